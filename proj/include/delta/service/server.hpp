#pragma once

#include <memory>
#include <mutex>

#include "delta/proxy/neural_proxy.hpp"
#include "delta/service/battles.hpp"
#include "delta/service/config.hpp"
#include "delta/service/store.hpp"

namespace httplib {
class Server;
}

namespace delta::service {

// JSON REST API over a RoleStore and a BattleManager.
//
//   GET  /api/health
//   GET  /api/roles                      POST /api/roles
//   GET  /api/roles/{id}                 POST /api/roles/{id}/evolve
//   POST /api/battles                    GET  /api/battles/{id}
//   GET  /api/battles/{id}/log?from=N&follow=1   (JSON lines, chunked)
//   POST /api/battles/{id}/actions
class Server {
 public:
  // A null proxy means config.make_proxy().
  explicit Server(ServiceConfig config, std::unique_ptr<proxy::NeuralProxy> proxy = nullptr);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds the configured address (port 0 picks a free one) and returns the
  // bound port. Throws delta::Error.
  int bind();
  // Serves until stop(). Binds first if needed.
  void run();
  void stop();
  // Blocks until run() accepts connections.
  void wait_ready() const;

  RoleStore& store() { return store_; }
  BattleManager& battles() { return battles_; }
  const ServiceConfig& config() const { return config_; }

 private:
  void routes();

  ServiceConfig config_;
  std::unique_ptr<proxy::NeuralProxy> proxy_;
  RoleStore store_;
  BattleManager battles_;
  std::unique_ptr<httplib::Server> http_;
  bool bound_ = false;
};

// Detail view used by GET /api/roles/{id} and the CLI.
nlohmann::json role_json(const RoleRecord& r);

}  // namespace delta::service
