// Stand-in program-task: optionally checks its input token, sleeps, then
// writes an output token. Exit status 0 on success, 2 on a missing input,
// 3 when the output cannot be written.

#include <chrono>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

int main(int argc, char** argv) {
  CLI::App app{"mock program-task"};
  double sleep_s = 0.0;
  std::string out;
  std::string in;
  app.add_option("--sleep-s", sleep_s, "seconds to sleep")->check(CLI::NonNegativeNumber);
  app.add_option("--out", out, "token file to write")->required();
  app.add_option("--in", in, "token file that must exist");
  CLI11_PARSE(app, argc, argv);

  if (!in.empty() && !std::ifstream(in)) {
    std::cerr << "mock_task: missing input " << in << '\n';
    return 2;
  }
  std::this_thread::sleep_for(std::chrono::duration<double>(sleep_s));
  std::ofstream token(out);
  token << "token " << out << " slept " << sleep_s << '\n';
  if (!token) return 3;
  return 0;
}
