#include "bagrasp/proposal.hpp"

#include <cmath>
#include <istream>
#include <numbers>

#include "bagrasp/error.hpp"
#include "json.hpp"

namespace bagrasp {

double wrap_half_turn(double theta) {
    constexpr double pi = std::numbers::pi;
    double t = std::fmod(theta, pi);
    if (t > pi / 2) t -= pi;
    if (t <= -pi / 2) t += pi;
    return t;
}

std::string to_json_line(const GraspProposal& p) {
    nlohmann::ordered_json j;
    j["x"] = p.target.x();
    j["y"] = p.target.y();
    j["theta"] = p.theta;
    j["t"] = p.timestamp;
    return j.dump();
}

GraspProposal parse_json_line(const std::string& line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string("proposal: invalid JSON: ") + e.what());
    }
    auto number = [&](const char* key) {
        if (!j.is_object() || !j.contains(key) || !j[key].is_number()) {
            throw Error(ErrorCode::ParseError, std::string("proposal: missing numeric field '") + key + "'");
        }
        const double v = j[key].get<double>();
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::ParseError, std::string("proposal: non-finite '") + key + "'");
        }
        return v;
    };
    GraspProposal p;
    p.target = {number("x"), number("y")};
    p.theta = number("theta");
    p.timestamp = number("t");
    return p;
}

std::vector<GraspProposal> read_json_lines(std::istream& in) {
    std::vector<GraspProposal> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        out.push_back(parse_json_line(line));
    }
    return out;
}

}  // namespace bagrasp
