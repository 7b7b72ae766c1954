#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace sdx::testing {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string stock_text() { return read_file(std::string(SDX_CONFIG_DIR) + "/sdx.yaml"); }

inline std::string stock_verbatim_text() {
  return read_file(std::string(SDX_TEST_DATA) + "/stock_verbatim.yaml");
}

}  // namespace sdx::testing
