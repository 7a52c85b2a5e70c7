#include "bagrasp/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

namespace bagrasp {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw Error(ErrorCode::ConfigError, "config: '" + key + "' expects a number, got '" + v + "'");
    }
    return out;
}

int parse_int(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    int out = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw Error(ErrorCode::ConfigError, "config: '" + key + "' expects an integer, got '" + v + "'");
    }
    return out;
}

std::vector<std::string> split_commas(const std::string& v) {
    std::vector<std::string> parts;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(trim(item));
    return parts;
}

Rgb parse_rgb(const std::string& key, const std::string& v) {
    const auto parts = split_commas(v);
    if (parts.size() != 3) {
        throw Error(ErrorCode::ConfigError, "config: '" + key + "' expects r,g,b");
    }
    std::array<std::uint8_t, 3> c{};
    for (int i = 0; i < 3; ++i) {
        const int x = parse_int(key, parts[i]);
        if (x < 0 || x > 255) {
            throw Error(ErrorCode::ConfigError, "config: '" + key + "' component out of 0..255");
        }
        c[i] = static_cast<std::uint8_t>(x);
    }
    return {c[0], c[1], c[2]};
}

bool parse_bool(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw Error(ErrorCode::ConfigError, "config: '" + key + "' expects true/false");
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string fmt(Rgb c) {
    return std::to_string(c.r) + "," + std::to_string(c.g) + "," + std::to_string(c.b);
}

struct Field {
    std::function<void(Config&, const std::string&, const std::string&)> set;
    std::function<std::string(const Config&)> get;
};

template <typename M>
Field number_field(M member) {
    return {[member](Config& c, const std::string& k, const std::string& v) {
                std::invoke(member, c) = parse_double(k, v);
            },
            [member](const Config& c) { return fmt(std::invoke(member, const_cast<Config&>(c))); }};
}

template <typename M>
Field int_field(M member) {
    return {[member](Config& c, const std::string& k, const std::string& v) {
                std::invoke(member, c) = parse_int(k, v);
            },
            [member](const Config& c) { return std::to_string(std::invoke(member, const_cast<Config&>(c))); }};
}

template <typename M>
Field rgb_field(M member) {
    return {[member](Config& c, const std::string& k, const std::string& v) {
                std::invoke(member, c) = parse_rgb(k, v);
            },
            [member](const Config& c) { return fmt(std::invoke(member, const_cast<Config&>(c))); }};
}

// Ordered so to_text() output is stable.
const std::map<std::string, Field>& fields() {
    static const std::map<std::string, Field> table = [] {
        std::map<std::string, Field> t;
        t["sigma"] = number_field([](Config& c) -> double& { return c.classical.sigma; });
        t["canny_low"] = number_field([](Config& c) -> double& { return c.classical.canny_low; });
        t["canny_high"] = number_field([](Config& c) -> double& { return c.classical.canny_high; });
        t["perimeter_min"] = number_field([](Config& c) -> double& { return c.classical.perimeter_min; });
        t["color_low"] = rgb_field([](Config& c) -> Rgb& { return c.classical.color_low; });
        t["color_high"] = rgb_field([](Config& c) -> Rgb& { return c.classical.color_high; });
        t["scale_x"] = number_field([](Config& c) -> double& { return c.camera.scale_x; });
        t["scale_y"] = number_field([](Config& c) -> double& { return c.camera.scale_y; });
        t["shift_x"] = number_field([](Config& c) -> double& { return c.camera.shift_x; });
        t["shift_y"] = number_field([](Config& c) -> double& { return c.camera.shift_y; });
        t["grasp_z"] = number_field([](Config& c) -> double& { return c.grasp_z; });
        t["window"] = number_field([](Config& c) -> double& { return c.denoise.window; });
        t["distance_threshold"] =
            number_field([](Config& c) -> double& { return c.denoise.distance_threshold; });
        t["theta_bin_deg"] = number_field([](Config& c) -> double& { return c.denoise.theta_bin_deg; });
        t["kp"] = number_field([](Config& c) -> double& { return c.control.kp; });
        t["kd"] = number_field([](Config& c) -> double& { return c.control.kd; });
        t["damping"] = number_field([](Config& c) -> double& { return c.control.damping; });
        t["qdot_max"] = number_field([](Config& c) -> double& { return c.control.qdot_max; });
        t["rate"] = number_field([](Config& c) -> double& { return c.control.rate; });
        t["duration"] = number_field([](Config& c) -> double& { return c.sim.duration; });
        t["settle"] = number_field([](Config& c) -> double& { return c.sim.settle; });
        t["frames"] = int_field([](Config& c) -> int& { return c.sim.frames; });
        t["frame_rate"] = number_field([](Config& c) -> double& { return c.sim.frame_rate; });
        t["noise_sigma"] = number_field([](Config& c) -> double& { return c.sim.noise_sigma; });
        t["pos_tol"] = number_field([](Config& c) -> double& { return c.sim.pos_tol; });
        t["ang_tol_deg"] = number_field([](Config& c) -> double& { return c.sim.ang_tol_deg; });
        t["good_grasp_px"] = number_field([](Config& c) -> double& { return c.sim.good_grasp_px; });
        t["min_creases"] = int_field([](Config& c) -> int& { return c.sim.min_creases; });
        t["max_creases"] = int_field([](Config& c) -> int& { return c.sim.max_creases; });
        t["lr"] = number_field([](Config& c) -> double& { return c.train.lr; });
        t["batch"] = int_field([](Config& c) -> int& { return c.train.batch; });
        t["epochs"] = int_field([](Config& c) -> int& { return c.train.epochs; });
        t["start_q"] = {[](Config& c, const std::string& k, const std::string& v) {
                            const auto parts = split_commas(v);
                            if (parts.size() != 7) {
                                throw Error(ErrorCode::ConfigError, "config: 'start_q' expects 7 values");
                            }
                            for (int i = 0; i < 7; ++i) c.sim.start_q[i] = parse_double(k, parts[i]);
                        },
                        [](const Config& c) {
                            std::string s;
                            for (int i = 0; i < 7; ++i) s += (i ? "," : "") + fmt(c.sim.start_q[i]);
                            return s;
                        }};
        t["arm"] = {[](Config& c, const std::string&, const std::string& v) { c.sim.arm_file = trim(v); },
                    [](const Config& c) { return c.sim.arm_file; }};
        t["flat_scenes"] = {[](Config& c, const std::string& k, const std::string& v) {
                                c.sim.flat_scenes = parse_bool(k, v);
                            },
                            [](const Config& c) { return std::string(c.sim.flat_scenes ? "true" : "false"); }};
        return t;
    }();
    return table;
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw Error(ErrorCode::ConfigError, "config: " + msg);
}

}  // namespace

void Config::set(const std::string& key, const std::string& value) {
    const auto it = fields().find(trim(key));
    if (it == fields().end()) {
        throw Error(ErrorCode::ConfigError, "config: unknown key '" + trim(key) + "'");
    }
    it->second.set(*this, it->first, value);
}

void Config::validate() const {
    require(classical.sigma > 0.0, "sigma must be > 0");
    require(classical.canny_low > 0.0 && classical.canny_low < classical.canny_high &&
                classical.canny_high <= 1.0,
            "need 0 < canny_low < canny_high <= 1");
    require(classical.perimeter_min > 0.0, "perimeter_min must be > 0");
    require(classical.color_low.r <= classical.color_high.r &&
                classical.color_low.g <= classical.color_high.g &&
                classical.color_low.b <= classical.color_high.b,
            "color_low must be componentwise <= color_high");
    require(camera.scale_x != 0.0 && camera.scale_y != 0.0, "scale_x/scale_y must be nonzero");
    require(denoise.window > 0.0, "window must be > 0");
    require(denoise.distance_threshold >= 0.0, "distance_threshold must be >= 0");
    require(denoise.theta_bin_deg > 0.0, "theta_bin_deg must be > 0");
    require(control.kp > 0.0, "kp must be > 0");
    require(control.kd >= 0.0, "kd must be >= 0");
    require(control.damping >= 0.0, "damping must be >= 0");
    require(control.qdot_max > 0.0, "qdot_max must be > 0");
    require(control.rate > 0.0, "rate must be > 0");
    require(sim.duration > 0.0, "duration must be > 0");
    require(sim.settle >= 0.0, "settle must be >= 0");
    require(sim.frames >= 1, "frames must be >= 1");
    require(sim.frame_rate > 0.0, "frame_rate must be > 0");
    require(sim.noise_sigma >= 0.0, "noise_sigma must be >= 0");
    require(sim.pos_tol > 0.0 && sim.ang_tol_deg > 0.0, "tolerances must be > 0");
    require(sim.min_creases >= 1 && sim.max_creases >= sim.min_creases,
            "need 1 <= min_creases <= max_creases");
    require(train.lr > 0.0, "lr must be > 0");
    require(train.batch >= 1, "batch must be >= 1");
    require(train.epochs >= 0, "epochs must be >= 0");
}

std::string Config::to_text() const {
    std::string out;
    for (const auto& [key, field] : fields()) out += key + "=" + field.get(*this) + "\n";
    return out;
}

Config parse_config(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::ConfigError,
                        "config line " + std::to_string(lineno) + ": expected key=value");
        }
        cfg.set(line.substr(0, eq), line.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::FileOpen, "cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace bagrasp
