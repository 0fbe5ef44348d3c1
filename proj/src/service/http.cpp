#include "certdag/service/service.hpp"

// After Eigen: <resolv.h> (pulled in by httplib) defines _res, which Eigen uses as a name.
#include <httplib.h>

namespace certdag::service {

namespace {

void reply(httplib::Response& res, const Response& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

nlohmann::json body_of(const httplib::Request& req) {
  if (req.body.empty()) return nlohmann::json::object();
  return nlohmann::json::parse(req.body, nullptr, false);
}

}  // namespace

void serve(SessionService& svc, const std::string& host, int port) {
  httplib::Server srv;
  srv.Post("/sessions", [&](const httplib::Request& req, httplib::Response& res) {
    auto b = body_of(req);
    reply(res, b.is_discarded() ? Response{400, {{"error", "MALFORMED_JSON"}}} : svc.create(b));
  });
  srv.Get(R"(/sessions/(\w+)/question)", [&](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.next(req.matches[1]));
  });
  srv.Post(R"(/sessions/(\w+)/answer)", [&](const httplib::Request& req, httplib::Response& res) {
    auto b = body_of(req);
    reply(res, b.is_discarded() ? Response{400, {{"error", "MALFORMED_JSON"}}} : svc.answer(req.matches[1], b));
  });
  srv.Get(R"(/sessions/(\w+)/trace)", [&](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.trace(req.matches[1]));
  });
  srv.Get(R"(/sessions/(\w+)/metrics)", [&](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.metrics(req.matches[1]));
  });
  srv.Post(R"(/sessions/(\w+)/resume)", [&](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.resume(req.matches[1]));
  });
  srv.listen(host, port);
}

}  // namespace certdag::service
