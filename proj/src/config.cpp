#include "vamos/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "vamos/grid_table.hpp"

namespace vamos {

namespace {

const std::map<std::string, std::string>& defaults() {
    static const std::map<std::string, std::string> d = {
        {"seed", "1"},
        {"tables_dir", "tables"},
        {"auto_generate", "false"},
        {"receivers", "joint_mlse,mic,sic,vmic"},
        // Stage-1 raw-BER tables
        {"stage1.bursts_per_point", "40"},
        {"stage1.channel_order", "2"},
        {"stage1.desired_db", "-4:36:4"},
        {"stage1.co_gmsk_db", "-10,0,10,20,30"},
        {"stage1.co_osc_db", "-10,0,10,20,30"},
        {"stage1.adjacent_db", "-10,10,30"},
        {"stage1.scpir_db", "-12,-6,0,6,12"},
        // Stage-2 FER tables
        {"stage2.frames_per_point", "1000"},
        {"stage2.mean", "0:0.5:0.01"},
        {"stage2.var", "0:0.05:0.005"},
        // RRA tables
        {"rra.frames_per_point", "400"},
        {"rra.snr_db", "-10:40:1"},
        // Network
        {"cell_radius_m", "500"},
        {"sectors", "1"},
        {"reuse", "12"},
        {"clusters", "9"},
        {"pathloss_exponent", "3.76"},
        {"gain_1m_db", "-8.06"},
        {"shadow_sigma_db", "8"},
        {"K", "8"},
        {"P_max_dbm", "30"},
        {"noise_dbm", "-111.65"},
        {"SCPIR_max_db", "12"},
        {"N_bursts", "4"},
        {"P_int_db", "10"},
        {"dtx_silence_prob", "0.4"},
        {"adjacent_attenuation_db", "18"},
        {"fer_thr", "0.01"},
        {"dp_limit", "12"},
        {"receiver", "mic"},
        {"strategy", "pure_vamos"},
        {"dtx", "false"},
        {"hot_spot", "false"},
        {"loads", "8:40:4"},
        {"drops", "100"},
        // Capacity report
        {"capacity.reference", "no_vamos"},
        {"capacity.cases", "poob,pure_vamos,poob+hot_spot"},
        // Link sweep
        {"link.scenario", "MTS-1"},
        {"link.sinr_db", "-4:12:2"},
        {"link.scpir_db", "0"},
        {"link.groups", "250"},
        {"link.channel_order", "2"},
        {"link.snr_db", "40"},
        {"link.n_bursts", "8"},
        // Channel-estimation sweep
        {"chanest.snr_db", "0:30:5"},
        {"chanest.channels", "5000"},
        {"chanest.order", "5"},
        {"chanest.scpir_db", "0"},
    };
    return d;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
    std::istringstream in(text);
    in.imbue(std::locale::classic());
    double v = 0.0;
    in >> v;
    if (!in || !(in >> std::ws).eof()) {
        throw ConfigError("config key '" + key + "': '" + text + "' is not a number");
    }
    return v;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text, const std::string& source) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(source + ":" + std::to_string(n) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError(source + ":" + std::to_string(n) + ": empty key");
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

Settings::Settings() : values_(defaults()) {}

void Settings::apply(const std::map<std::string, std::string>& values, const std::string& source) {
    for (const auto& [k, v] : values) {
        if (!defaults().count(k)) throw ConfigError(source + ": unknown config key '" + k + "'");
        values_[k] = v;
    }
}

void Settings::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    apply(parse_key_values(ss.str(), path), path);
}

void Settings::apply_overrides(const std::vector<std::string>& assignments) {
    std::map<std::string, std::string> kv;
    for (const auto& a : assignments) {
        const auto eq = a.find('=');
        if (eq == std::string::npos) throw ConfigError("override '" + a + "' is not key=value");
        kv[trim(a.substr(0, eq))] = trim(a.substr(eq + 1));
    }
    apply(kv, "command line");
}

const std::string& Settings::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
    return it->second;
}

double Settings::get_double(const std::string& key) const { return parse_double(key, get(key)); }

int Settings::get_int(const std::string& key) const {
    const std::string& s = get(key);
    int v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
        throw ConfigError("config key '" + key + "': '" + s + "' is not an integer");
    }
    return v;
}

std::uint64_t Settings::get_u64(const std::string& key) const {
    const std::string& s = get(key);
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
        throw ConfigError("config key '" + key + "': '" + s + "' is not an unsigned integer");
    }
    return v;
}

bool Settings::get_bool(const std::string& key) const {
    const std::string& s = get(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError("config key '" + key + "': '" + s + "' is not a boolean");
}

std::vector<std::string> Settings::get_strings(const std::string& key) const {
    std::vector<std::string> out;
    std::istringstream in(get(key));
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    if (out.empty()) throw ConfigError("config key '" + key + "' is empty");
    return out;
}

std::vector<double> Settings::get_doubles(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : get_strings(key)) {
        const auto c1 = item.find(':');
        if (c1 == std::string::npos) {
            out.push_back(parse_double(key, item));
            continue;
        }
        const auto c2 = item.find(':', c1 + 1);
        if (c2 == std::string::npos) throw ConfigError("config key '" + key + "': range needs lo:hi:step");
        const double lo = parse_double(key, item.substr(0, c1));
        const double hi = parse_double(key, item.substr(c1 + 1, c2 - c1 - 1));
        const double step = parse_double(key, item.substr(c2 + 1));
        try {
            const auto r = linspace_step(lo, hi, step);
            out.insert(out.end(), r.begin(), r.end());
        } catch (const InvalidInput& e) {
            throw ConfigError("config key '" + key + "': " + e.what());
        }
    }
    return out;
}

std::uint64_t Settings::hash() const {
    std::string text;
    for (const auto& [k, v] : values_) text += k + "=" + v + "\n";
    return fnv1a64(text);
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return s;
}

}  // namespace vamos
