#include <atomic>
#include <csignal>
#include <iostream>

#include "commands.hpp"

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  return aerotwin::cli::run(argc, argv, std::cout, std::cerr, &g_stop);
}
