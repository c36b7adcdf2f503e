#pragma once

#include <fstream>
#include <sstream>
#include <string>

namespace fixtures {

/// Contents of a file below the source tree.
inline std::string read_source_file(const std::string& relative) {
    std::ifstream in(std::string(POCAN_SOURCE_DIR) + "/" + relative);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace fixtures
