// Misbehaving solvers for exercising the benchmark harness.
//
//   stub_solver correct TRACK VALUE [instance]       prints "s TRACK VALUE"
//   stub_solver wrong-answer TRACK VALUE [instance]  prints twice VALUE plus one
//   stub_solver sleeper [instance]                   never answers
//   stub_solver memory-hog [instance]                grows by 10 MB every 10 ms
//   stub_solver crasher [instance]                   aborts without output

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <gmpxx.h>

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: stub_solver MODE ...\n";
    return 1;
  }
  const std::string mode = argv[1];
  if (mode == "correct" || mode == "wrong-answer") {
    if (argc < 4) {
      std::cerr << "usage: stub_solver " << mode << " TRACK VALUE\n";
      return 1;
    }
    std::string value = argv[3];
    if (mode == "wrong-answer") value = mpz_class(2 * mpz_class(value) + 1).get_str();
    std::cout << "c stub solver\ns " << argv[2] << ' ' << value << '\n';
    return 0;
  }
  if (mode == "sleeper") {
    std::this_thread::sleep_for(std::chrono::hours(1));
    return 0;
  }
  if (mode == "memory-hog") {
    constexpr std::size_t kChunk = 10u << 20;
    std::vector<std::unique_ptr<char[]>> chunks;
    for (;;) {
      chunks.emplace_back(new char[kChunk]);
      std::memset(chunks.back().get(), 1, kChunk);
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
  }
  if (mode == "crasher") {
    std::abort();
  }
  std::cerr << "unknown mode " << mode << '\n';
  return 1;
}
