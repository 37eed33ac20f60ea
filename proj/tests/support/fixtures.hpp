#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "pfpn/json_io.hpp"

namespace fixtures {

inline std::string data_dir() { return PFPN_DATA_DIR; }

inline std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline pfpn::Net load_net(const std::string& name) {
    return pfpn::parse_net(slurp(data_dir() + "/" + name));
}

inline pfpn::Marking load_marking(const std::string& name, const pfpn::Net& net) {
    return pfpn::marking_from_json(pfpn::parse_json(slurp(data_dir() + "/" + name)), net);
}

} // namespace fixtures
