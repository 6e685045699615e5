#include "corrattack/remote_oracle.hpp"

#include <httplib.h>

#include <json.hpp>
#include <thread>

#include "corrattack/errors.hpp"

namespace corrattack {

using nlohmann::json;

struct RemoteOracle::Connection {
    std::unique_ptr<httplib::Client> client;
    std::string prefix;
};

namespace {

// Splits "http://host:port/prefix/" into ("http://host:port", "/prefix").
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    const auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos)
        throw std::invalid_argument("oracle endpoint must include a scheme: " + endpoint);
    const auto path_start = endpoint.find('/', scheme_end + 3);
    std::string base = endpoint.substr(0, path_start);
    std::string prefix = path_start == std::string::npos ? "" : endpoint.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {base, prefix};
}

}  // namespace

std::string encode_logits_request(const Image& x) {
    json body;
    body["shape"] = {x.channels(), x.height(), x.width()};
    body["pixels"] = std::vector<double>(x.pixels().begin(), x.pixels().end());
    return body.dump();
}

Image decode_logits_request(const std::string& body) {
    try {
        const json j = json::parse(body);
        const auto shape = j.at("shape").get<std::vector<int>>();
        if (shape.size() != 3) throw ProtocolError("shape must have three entries");
        auto pixels = j.at("pixels").get<std::vector<double>>();
        for (double p : pixels)
            if (!(p >= 0.0 && p <= 1.0)) throw ProtocolError("pixel outside [0,1]");
        return Image(Shape{shape[0], shape[1], shape[2]}, std::move(pixels));
    } catch (const json::exception& e) {
        throw ProtocolError(std::string("malformed logits request: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ProtocolError(std::string("malformed logits request: ") + e.what());
    }
}

std::string encode_logits_response(std::span<const double> logits) {
    json body;
    body["logits"] = std::vector<double>(logits.begin(), logits.end());
    return body.dump();
}

std::vector<double> decode_logits_response(const std::string& body) {
    try {
        auto logits = json::parse(body).at("logits").get<std::vector<double>>();
        if (logits.empty()) throw ProtocolError("empty logits array");
        return logits;
    } catch (const json::exception& e) {
        throw ProtocolError(std::string("malformed logits response: ") + e.what());
    }
}

RemoteOracle::RemoteOracle(std::string endpoint) : RemoteOracle(std::move(endpoint), Options{}) {}

RemoteOracle::RemoteOracle(std::string endpoint, Options opts)
    : endpoint_(std::move(endpoint)), opts_(opts), conn_(std::make_unique<Connection>()) {
    auto [base, prefix] = split_endpoint(endpoint_);
    conn_->client = std::make_unique<httplib::Client>(base);
    conn_->prefix = prefix;
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(opts_.timeout);
    const auto usecs =
        std::chrono::duration_cast<std::chrono::microseconds>(opts_.timeout - secs);
    conn_->client->set_connection_timeout(secs.count(), usecs.count());
    conn_->client->set_read_timeout(secs.count(), usecs.count());
    conn_->client->set_write_timeout(secs.count(), usecs.count());
}

RemoteOracle::~RemoteOracle() = default;

namespace {

template <typename Call>
httplib::Result with_retries(const RemoteOracle::Options& opts, const std::string& what,
                             Call call) {
    std::string last_error;
    auto delay = opts.backoff;
    for (int attempt = 1; attempt <= opts.max_attempts; ++attempt) {
        httplib::Result res = call();
        if (res && res->status != 503) return res;
        last_error = res ? "HTTP 503 (model loading)" : httplib::to_string(res.error());
        if (attempt < opts.max_attempts) {
            std::this_thread::sleep_for(delay);
            delay *= 2;
        }
    }
    throw OracleUnavailable(what + " failed after " + std::to_string(opts.max_attempts) +
                            " attempts: " + last_error);
}

}  // namespace

HealthInfo RemoteOracle::health() {
    auto res = with_retries(opts_, "GET /v1/health",
                            [&] { return conn_->client->Get(conn_->prefix + "/v1/health"); });
    if (res->status != 200)
        throw ProtocolError("health endpoint returned HTTP " + std::to_string(res->status));
    try {
        const json j = json::parse(res->body);
        HealthInfo info{j.at("status").get<std::string>(), j.value("model", std::string{}),
                        j.at("classes").get<std::size_t>()};
        if (info.status == "ok") classes_ = info.classes;
        return info;
    } catch (const json::exception& e) {
        throw ProtocolError(std::string("malformed health response: ") + e.what());
    }
}

std::size_t RemoteOracle::num_classes() {
    if (!classes_) {
        const HealthInfo info = health();
        if (info.status != "ok") throw OracleUnavailable("oracle reports status " + info.status);
    }
    return *classes_;
}

std::vector<double> RemoteOracle::compute_logits(const Image& x) {
    const std::string body = encode_logits_request(x);
    auto res = with_retries(opts_, "POST /v1/logits", [&] {
        return conn_->client->Post(conn_->prefix + "/v1/logits", body, "application/json");
    });
    if (res->status == 400) throw ProtocolError("oracle rejected request: " + res->body);
    if (res->status != 200)
        throw OracleUnavailable("logits endpoint returned HTTP " + std::to_string(res->status));
    return decode_logits_response(res->body);
}

}  // namespace corrattack
