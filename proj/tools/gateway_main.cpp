// Copyright 2026 The Instant Assist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <pthread.h>
#include <thread>

#include "instant_assist/gateway.hpp"

namespace gw = instant_assist::gateway;

int main(int argc, char** argv) {
  CLI::App app{"Question-answering engine gateway (/ask, /questions, /health)",
               "instant-assist-gateway"};
  std::string config_path;
  app.add_option("--config", config_path,
                 "Config file (overrides $INSTANT_ASSIST_CONFIG)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (config_path.empty()) {
    if (const char* env = std::getenv(gw::kConfigEnvVar.data())) {
      config_path = env;
    }
  }
  if (config_path.empty()) {
    std::cerr << "error: no config; pass --config or set "
              << gw::kConfigEnvVar << "\n";
    return 2;
  }

  auto loaded = gw::load_config_file(config_path);
  if (!loaded) {
    for (const auto& error : loaded.error()) {
      std::cerr << "config error: " << gw::describe(error) << "\n";
    }
    return 2;
  }
  for (const auto& warning : loaded->warnings) {
    std::cerr << "warning: " << warning << "\n";
  }

  auto gateway = gw::create_gateway(loaded->config,
                                    std::make_shared<gw::RequestLog>(std::cout));
  if (!gateway) {
    for (const auto& error : gateway.error()) {
      std::cerr << "config error: " << error << "\n";
    }
    return 2;
  }

  const auto address = gw::split_bind_address(loaded->config.bind_address);
  gw::GatewayServer server(**gateway);
  if (!server.bind(address->first, address->second)) {
    std::cerr << "error: cannot bind " << loaded->config.bind_address << "\n";
    return 2;
  }

  // Block the shutdown signals everywhere, then wait for them here.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  server.start();
  std::cerr << "listening on " << address->first << ":" << server.port()
            << "\n";

  int received = 0;
  sigwait(&signals, &received);
  server.stop();
  return 0;
}
