#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "tenk/http_transport.hpp"

#include <httplib.h>

#include <algorithm>
#include <regex>

#include "tenk/error.hpp"
#include "tenk/text.hpp"

namespace tenk {

std::string HttpResponse::header(const std::string& name) const {
    auto wanted = text::to_lower_ascii(name);
    for (const auto& [key, value] : headers) {
        if (text::to_lower_ascii(key) == wanted) return value;
    }
    return {};
}

UrlParts split_url(const std::string& url) {
    static const std::regex pattern(R"(^(https?)://([^/:?#]+)(?::(\d+))?([^#]*)$)", std::regex::icase);
    std::smatch match;
    if (!std::regex_match(url, match, pattern)) {
        throw Error(ErrorCode::InvalidArgument, "unsupported URL: " + url);
    }
    UrlParts parts;
    parts.scheme = text::to_lower_ascii(match[1].str());
    parts.host = match[2].str();
    parts.port = match[3].matched ? std::stoi(match[3].str()) : (parts.scheme == "https" ? 443 : 80);
    parts.target = match[4].str().empty() ? "/" : match[4].str();
    return parts;
}

HttplibTransport::HttplibTransport(int timeout_seconds) : timeout_seconds_(timeout_seconds) {}

HttpResponse HttplibTransport::send(const HttpRequest& request) {
    auto parts = split_url(request.url);
    std::string origin = parts.scheme + "://" + parts.host + ":" + std::to_string(parts.port);
    httplib::Client client(origin);
    client.set_connection_timeout(timeout_seconds_, 0);
    client.set_read_timeout(timeout_seconds_, 0);
    client.set_follow_location(true);

    httplib::Headers headers;
    std::string content_type = "application/octet-stream";
    for (const auto& [key, value] : request.headers) {
        if (text::to_lower_ascii(key) == "content-type") {
            content_type = value;
        } else {
            headers.emplace(key, value);
        }
    }

    httplib::Result result;
    if (request.method == "GET") {
        result = client.Get(parts.target, headers);
    } else if (request.method == "POST") {
        result = client.Post(parts.target, headers, request.body, content_type);
    } else {
        throw Error(ErrorCode::InvalidArgument, "unsupported method " + request.method);
    }
    if (!result) {
        throw Error(ErrorCode::NetworkError, request.method + " " + request.url + ": " + httplib::to_string(result.error()));
    }
    HttpResponse response;
    response.status = result->status;
    response.body = result->body;
    for (const auto& [key, value] : result->headers) response.headers[key] = value;
    return response;
}

}  // namespace tenk
