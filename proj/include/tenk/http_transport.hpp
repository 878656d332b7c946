#pragma once

#include <map>
#include <memory>
#include <string>

namespace tenk {

struct HttpRequest {
    std::string method = "GET";
    std::string url;
    std::map<std::string, std::string> headers;
    std::string body;
};

struct HttpResponse {
    int status = 0;
    std::string body;
    std::map<std::string, std::string> headers;

    std::string header(const std::string& name) const;
};

/// Single seam for all outbound HTTP. Connection-level failures raise
/// ErrorCode::NetworkError; any HTTP status is returned as a response.
class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse send(const HttpRequest& request) = 0;
};

/// cpp-httplib backed transport (http and https).
class HttplibTransport final : public HttpTransport {
public:
    explicit HttplibTransport(int timeout_seconds = 30);
    HttpResponse send(const HttpRequest& request) override;

private:
    int timeout_seconds_;
};

struct UrlParts {
    std::string scheme;
    std::string host;
    int port = 0;
    std::string target;  // path + query
};

UrlParts split_url(const std::string& url);

}  // namespace tenk
