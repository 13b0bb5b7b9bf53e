// Wire clients for the four external model roles: JSON Lines over a child
// process's stdio, or HTTP POST. One request/response schema serves both.

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <future>
#include <mutex>
#include <semaphore>
#include <thread>
#include <unordered_map>

#include "httplib.h"
#include "json.hpp"
#include "redcap/adapters.hpp"
#include "redcap/errors.hpp"

namespace redcap {

namespace {

using nlohmann::json;

class Endpoint {
 public:
  virtual ~Endpoint() = default;
  /// Sends one request (an "id" field is added) and returns the correlated
  /// response. Timeouts are retried per the endpoint config.
  virtual json request(json body) = 0;
};

// --- JSON Lines child process ----------------------------------------------

class ProcessEndpoint : public Endpoint {
 public:
  explicit ProcessEndpoint(const EndpointConfig& cfg)
      : cfg_(cfg), slots_(std::max(1, cfg.max_in_flight)) {
    spawn();
    reader_ = std::thread([this] { read_loop(); });
  }

  ~ProcessEndpoint() override {
    if (stdin_fd_ >= 0) ::close(stdin_fd_);
    if (reader_.joinable()) reader_.join();
    if (stdout_fd_ >= 0) ::close(stdout_fd_);
    reap_child();
  }

  json request(json body) override {
    slots_.acquire();
    struct Release {
      std::counting_semaphore<256>& s;
      ~Release() { s.release(); }
    } release{slots_};

    for (int attempt = 0; attempt <= cfg_.retries; ++attempt) {
      const std::string id = std::to_string(next_id_.fetch_add(1));
      body["id"] = id;
      auto pending = std::make_shared<std::promise<json>>();
      auto fut = pending->get_future();
      {
        std::lock_guard lock(mu_);
        if (stream_failed_) throw AdapterError("endpoint process stream failed", last_payload_);
        pending_[id] = pending;
      }
      const std::string line = body.dump() + "\n";
      {
        std::lock_guard lock(write_mu_);
        if (!write_all(line)) {
          std::lock_guard plock(mu_);
          pending_.erase(id);
          throw AdapterError("failed to write to endpoint process");
        }
      }
      if (fut.wait_for(std::chrono::milliseconds(cfg_.timeout_ms)) ==
          std::future_status::ready) {
        return fut.get();  // may rethrow a stored AdapterError
      }
      std::lock_guard lock(mu_);
      pending_.erase(id);  // a late response is dropped as unknown
    }
    throw AdapterError("endpoint process timed out after " +
                       std::to_string(cfg_.retries + 1) + " attempts");
  }

 private:
  void spawn() {
    int to_child[2];
    int from_child[2];
    if (::pipe(to_child) != 0 || ::pipe(from_child) != 0) {
      throw AdapterError("pipe() failed");
    }
    pid_ = ::fork();
    if (pid_ < 0) throw AdapterError("fork() failed");
    if (pid_ == 0) {
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::close(to_child[0]);
      ::close(to_child[1]);
      ::close(from_child[0]);
      ::close(from_child[1]);
      ::execl("/bin/sh", "sh", "-c", cfg_.command.c_str(), nullptr);
      _exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    stdin_fd_ = to_child[1];
    stdout_fd_ = from_child[0];
    ::signal(SIGPIPE, SIG_IGN);
  }

  bool write_all(const std::string& data) {
    std::size_t off = 0;
    while (off < data.size()) {
      const ssize_t n = ::write(stdin_fd_, data.data() + off, data.size() - off);
      if (n <= 0) return false;
      off += static_cast<std::size_t>(n);
    }
    return true;
  }

  void read_loop() {
    std::string buf;
    char chunk[4096];
    for (;;) {
      const ssize_t n = ::read(stdout_fd_, chunk, sizeof(chunk));
      if (n <= 0) break;
      buf.append(chunk, static_cast<std::size_t>(n));
      std::size_t pos;
      while ((pos = buf.find('\n')) != std::string::npos) {
        dispatch_line(buf.substr(0, pos));
        buf.erase(0, pos + 1);
      }
    }
    fail_all_pending("endpoint process closed its output");
  }

  void dispatch_line(const std::string& line) {
    if (line.empty()) return;
    json resp = json::parse(line, nullptr, false);
    if (resp.is_discarded() || !resp.contains("id") || !resp["id"].is_string()) {
      fail_all_pending("malformed endpoint response", line);
      return;
    }
    const std::string id = resp["id"];
    std::shared_ptr<std::promise<json>> target;
    {
      std::lock_guard lock(mu_);
      auto it = pending_.find(id);
      if (it == pending_.end()) return;  // unknown / stale id: rejected
      target = it->second;
      pending_.erase(it);
    }
    target->set_value(std::move(resp));
  }

  void fail_all_pending(const std::string& message, std::string payload = {}) {
    std::lock_guard lock(mu_);
    stream_failed_ = true;
    last_payload_ = payload;
    for (auto& [id, p] : pending_) {
      p->set_exception(std::make_exception_ptr(AdapterError(message, payload)));
    }
    pending_.clear();
  }

  void reap_child() {
    if (pid_ <= 0) return;
    for (int i = 0; i < 20; ++i) {
      if (::waitpid(pid_, nullptr, WNOHANG) != 0) return;
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, nullptr, 0);
  }

  EndpointConfig cfg_;
  pid_t pid_ = -1;
  int stdin_fd_ = -1;
  int stdout_fd_ = -1;
  std::thread reader_;
  std::mutex write_mu_;
  std::mutex mu_;
  bool stream_failed_ = false;
  std::string last_payload_;
  std::unordered_map<std::string, std::shared_ptr<std::promise<json>>> pending_;
  std::atomic<std::uint64_t> next_id_{1};
  std::counting_semaphore<256> slots_;
};

// --- HTTP POST ---------------------------------------------------------------

struct ParsedUrl {
  std::string base;  // scheme://host:port
  std::string path;
};

ParsedUrl parse_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("endpoint url missing scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

class HttpEndpoint : public Endpoint {
 public:
  explicit HttpEndpoint(const EndpointConfig& cfg)
      : cfg_(cfg), url_(parse_url(cfg.url)), slots_(std::max(1, cfg.max_in_flight)) {}

  json request(json body) override {
    slots_.acquire();
    struct Release {
      std::counting_semaphore<256>& s;
      ~Release() { s.release(); }
    } release{slots_};

    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.retries; ++attempt) {
      const std::string id = std::to_string(next_id_.fetch_add(1));
      body["id"] = id;
      httplib::Client client(url_.base);
      client.set_connection_timeout(0, cfg_.timeout_ms * 1000);
      client.set_read_timeout(cfg_.timeout_ms / 1000, (cfg_.timeout_ms % 1000) * 1000);
      client.set_write_timeout(cfg_.timeout_ms / 1000, (cfg_.timeout_ms % 1000) * 1000);
      auto res = client.Post(url_.path, body.dump(), "application/json");
      if (!res) {
        last_error = "transport: " + httplib::to_string(res.error());
        continue;  // connection failures and timeouts are retried
      }
      if (res->status != 200) {
        throw AdapterError("endpoint returned HTTP " + std::to_string(res->status),
                           res->body);
      }
      json resp = json::parse(res->body, nullptr, false);
      if (resp.is_discarded()) {
        throw AdapterError("malformed endpoint response", res->body);
      }
      if (!resp.contains("id") || resp["id"] != id) {
        throw AdapterError("response id does not match request id", res->body);
      }
      return resp;
    }
    throw AdapterError("endpoint unreachable after " + std::to_string(cfg_.retries + 1) +
                       " attempts (" + last_error + ")");
  }

 private:
  EndpointConfig cfg_;
  ParsedUrl url_;
  std::atomic<std::uint64_t> next_id_{1};
  std::counting_semaphore<256> slots_;
};

std::shared_ptr<Endpoint> make_endpoint(const EndpointConfig& cfg) {
  switch (cfg.transport) {
    case EndpointConfig::Transport::Process:
      return std::make_shared<ProcessEndpoint>(cfg);
    case EndpointConfig::Transport::Http:
      return std::make_shared<HttpEndpoint>(cfg);
    case EndpointConfig::Transport::Builtin:
      break;
  }
  throw ConfigError("role has no builtin implementation; configure a process or http endpoint");
}

BBox parse_box(const json& j) {
  if (!j.is_array() || j.size() != 4) throw AdapterError("box must be [x0,y0,x1,y1]", j.dump());
  return BBox{j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

// --- role clients ------------------------------------------------------------

class WireCaption : public CaptionService {
 public:
  explicit WireCaption(std::shared_ptr<Endpoint> ep) : ep_(std::move(ep)) {}
  std::string caption(const Raster& image) override {
    json req{{"image_png_b64", base64_encode(encode_png(image))}};
    json resp = ep_->request(std::move(req));
    if (!resp.contains("caption") || !resp["caption"].is_string()) {
      throw AdapterError("SUT response missing 'caption'", resp.dump());
    }
    return resp["caption"].get<std::string>();
  }

 private:
  std::shared_ptr<Endpoint> ep_;
};

class WireDetection : public DetectionService {
 public:
  explicit WireDetection(std::shared_ptr<Endpoint> ep) : ep_(std::move(ep)) {}
  std::vector<Detection> detect(const Raster& image) override {
    json req{{"image_png_b64", base64_encode(encode_png(image))}};
    json resp = ep_->request(std::move(req));
    if (!resp.contains("objects") || !resp["objects"].is_array()) {
      throw AdapterError("OD response missing 'objects'", resp.dump());
    }
    std::vector<Detection> out;
    for (const auto& o : resp["objects"]) {
      Detection d;
      d.label = o.at("label").get<std::string>();
      d.score = o.at("score").get<double>();
      d.box = parse_box(o.at("box"));
      out.push_back(std::move(d));
    }
    return out;
  }

 private:
  std::shared_ptr<Endpoint> ep_;
};

class WireInpaint : public InpaintService {
 public:
  explicit WireInpaint(std::shared_ptr<Endpoint> ep) : ep_(std::move(ep)) {}
  Raster inpaint(const Raster& image, const BBox& region) override {
    json req{{"image_png_b64", base64_encode(encode_png(image))},
             {"box", {region.x0, region.y0, region.x1, region.y1}}};
    json resp = ep_->request(std::move(req));
    if (!resp.contains("image_png_b64") || !resp["image_png_b64"].is_string()) {
      throw AdapterError("inpaint response missing 'image_png_b64'", resp.dump());
    }
    Raster out = decode_png(base64_decode(resp["image_png_b64"].get<std::string>()));
    if (out.width() != image.width() || out.height() != image.height()) {
      throw AdapterError("inpaint response has wrong dimensions", resp.dump());
    }
    return out;
  }

 private:
  std::shared_ptr<Endpoint> ep_;
};

class BuiltinInpaint : public InpaintService {
 public:
  Raster inpaint(const Raster& image, const BBox& region) override {
    return inpaint_ring_mean(image, region);
  }
};

class WireTagger : public TagService {
 public:
  explicit WireTagger(std::shared_ptr<Endpoint> ep) : ep_(std::move(ep)) {}
  std::vector<Token> tag(const std::string& text) override {
    json req{{"text", text}};
    json resp = ep_->request(std::move(req));
    if (!resp.contains("tokens") || !resp["tokens"].is_array()) {
      throw AdapterError("POS response missing 'tokens'", resp.dump());
    }
    std::vector<Token> out;
    for (const auto& t : resp["tokens"]) {
      out.push_back(Token{t.at("t").get<std::string>(), t.at("pos").get<std::string>(),
                          t.at("lemma").get<std::string>()});
    }
    return out;
  }

 private:
  std::shared_ptr<Endpoint> ep_;
};

class BuiltinTagger : public TagService {
 public:
  explicit BuiltinTagger(Lemmatizer lem) : tagger_(std::move(lem)) {}
  std::vector<Token> tag(const std::string& text) override { return tagger_.tag(text); }

 private:
  LexiconTagger tagger_;
};

}  // namespace

std::unique_ptr<CaptionService> make_caption_client(const EndpointConfig& cfg) {
  return std::make_unique<WireCaption>(make_endpoint(cfg));
}

std::unique_ptr<DetectionService> make_detection_client(const EndpointConfig& cfg) {
  return std::make_unique<WireDetection>(make_endpoint(cfg));
}

std::unique_ptr<InpaintService> make_inpaint_client(const EndpointConfig& cfg) {
  if (cfg.transport == EndpointConfig::Transport::Builtin) {
    return std::make_unique<BuiltinInpaint>();
  }
  return std::make_unique<WireInpaint>(make_endpoint(cfg));
}

std::unique_ptr<TagService> make_tag_client(const EndpointConfig& cfg, Lemmatizer lemmatizer) {
  if (cfg.transport == EndpointConfig::Transport::Builtin) {
    return std::make_unique<BuiltinTagger>(std::move(lemmatizer));
  }
  return std::make_unique<WireTagger>(make_endpoint(cfg));
}

}  // namespace redcap
