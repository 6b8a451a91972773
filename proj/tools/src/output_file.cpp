#include "output_file.hpp"

#include <unistd.h>

#include <array>
#include <atomic>
#include <csignal>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace expcorr::cli {

namespace {

// Temp paths live in fixed storage so the signal handler can unlink them
// without allocating.
constexpr std::size_t kSlots = 8;
constexpr std::size_t kPathMax = 4096;
std::array<char[kPathMax], kSlots> g_paths{};
std::array<std::atomic<bool>, kSlots> g_active{};

extern "C" void cleanup_and_exit(int) {
  for (std::size_t i = 0; i < kSlots; ++i) {
    if (g_active[i].load()) ::unlink(g_paths[i]);
  }
  ::_exit(130);
}

class TempSlot {
 public:
  explicit TempSlot(const std::string& path) {
    if (path.size() + 1 > kPathMax) throw std::runtime_error("output path too long: " + path);
    for (std::size_t i = 0; i < kSlots; ++i) {
      bool expected = false;
      if (!g_active[i].load()) {
        std::memcpy(g_paths[i], path.c_str(), path.size() + 1);
        if (g_active[i].compare_exchange_strong(expected, true)) {
          slot_ = i;
          return;
        }
      }
    }
    throw std::runtime_error("too many concurrent output files");
  }
  ~TempSlot() { g_active[slot_].store(false); }
  TempSlot(const TempSlot&) = delete;
  TempSlot& operator=(const TempSlot&) = delete;

 private:
  std::size_t slot_ = 0;
};

}  // namespace

void write_output(const std::string& path, std::string_view contents, std::ostream& console) {
  if (path == "-") {
    console.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    console.flush();
    return;
  }
  const std::string temp = path + ".tmp" + std::to_string(::getpid());
  TempSlot slot(temp);
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.close();
    if (!out) {
      std::remove(temp.c_str());
      throw std::runtime_error("failed writing " + path);
    }
  }
  std::error_code ec;
  std::filesystem::rename(temp, path, ec);
  if (ec) {
    std::remove(temp.c_str());
    throw std::runtime_error("cannot move output into place at " + path + ": " + ec.message());
  }
}

void install_signal_cleanup() {
  std::signal(SIGINT, cleanup_and_exit);
  std::signal(SIGTERM, cleanup_and_exit);
}

}  // namespace expcorr::cli
