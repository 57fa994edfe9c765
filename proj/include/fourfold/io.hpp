#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fourfold/errors.hpp"
#include "fourfold/field.hpp"
#include "fourfold/relax.hpp"

namespace fourfold {

inline std::string trim_copy(std::string s) {
    const auto notspace = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
    s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
    return s;
}

// Numeric literal with pi support: 0.5, 1e-3, pi, -pi/4, 3*pi/4, 0.5*pi.
inline double parse_scalar(const std::string& raw) {
    std::string s = raw;
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
            s.end());
    if (s.empty()) throw ConfigError("empty numeric value");
    const auto plain = [](const std::string& t) {
        char* end = nullptr;
        const double v = std::strtod(t.c_str(), &end);
        if (end != t.c_str() + t.size() || t.empty())
            throw ConfigError("cannot parse numeric value '" + t + "'");
        return v;
    };
    {
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (end == s.c_str() + s.size()) return v;
    }
    double sign = 1.0;
    size_t pos = 0;
    if (s[0] == '+' || s[0] == '-') {
        sign = (s[0] == '-') ? -1.0 : 1.0;
        pos = 1;
    }
    std::string rest = s.substr(pos);
    double coef = 1.0;
    const size_t star = rest.find('*');
    if (star != std::string::npos) {
        coef = plain(rest.substr(0, star));
        rest = rest.substr(star + 1);
    }
    if (rest.rfind("pi", 0) != 0) throw ConfigError("cannot parse numeric value '" + raw + "'");
    rest = rest.substr(2);
    double divisor = 1.0;
    if (!rest.empty()) {
        if (rest[0] != '/') throw ConfigError("cannot parse numeric value '" + raw + "'");
        divisor = plain(rest.substr(1));
    }
    return sign * coef * pi / divisor;
}

// Flat key = value configuration.  '#' starts a comment, blank lines are
// ignored, duplicate keys are an error.  Serialization preserves insertion
// order so parse -> serialize -> parse is the identity.
struct Config {
    std::vector<std::pair<std::string, std::string>> items;

    bool has(const std::string& key) const {
        for (const auto& [k, v] : items)
            if (k == key) return true;
        return false;
    }

    const std::string& raw(const std::string& key) const {
        for (const auto& [k, v] : items)
            if (k == key) return v;
        throw ConfigError("missing required config key '" + key + "'");
    }

    void set(const std::string& key, const std::string& value) {
        for (auto& [k, v] : items)
            if (k == key) {
                v = value;
                return;
            }
        items.emplace_back(key, value);
    }

    double number(const std::string& key) const { return parse_scalar(raw(key)); }
    double number_or(const std::string& key, double def) const {
        return has(key) ? number(key) : def;
    }
    long integer(const std::string& key) const {
        const double v = number(key);
        const long n = std::lround(v);
        if (std::abs(v - static_cast<double>(n)) > 1e-9)
            throw ConfigError("config key '" + key + "' must be an integer");
        return n;
    }
    long integer_or(const std::string& key, long def) const {
        return has(key) ? integer(key) : def;
    }
    std::string text_or(const std::string& key, const std::string& def) const {
        return has(key) ? raw(key) : def;
    }
    bool flag_or(const std::string& key, bool def) const {
        if (!has(key)) return def;
        const std::string v = trim_copy(raw(key));
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw ConfigError("config key '" + key + "' must be a boolean");
    }

    // scalar or bracketed comma list: nu = 5   /   nu = [1, 5, 50]
    std::vector<double> number_list(const std::string& key) const {
        std::string v = trim_copy(raw(key));
        if (!v.empty() && v.front() == '[') {
            if (v.back() != ']') throw ConfigError("unterminated list for key '" + key + "'");
            v = v.substr(1, v.size() - 2);
        }
        std::vector<double> out;
        std::stringstream ss(v);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok = trim_copy(tok);
            if (!tok.empty()) out.push_back(parse_scalar(tok));
        }
        if (out.empty()) throw ConfigError("empty list for key '" + key + "'");
        return out;
    }

    // bracketed list of WxH sizes: sizes = [8x16, 32x64]
    std::vector<std::pair<double, double>> size_list(const std::string& key) const {
        std::string v = trim_copy(raw(key));
        if (!v.empty() && v.front() == '[') {
            if (v.back() != ']') throw ConfigError("unterminated list for key '" + key + "'");
            v = v.substr(1, v.size() - 2);
        }
        std::vector<std::pair<double, double>> out;
        std::stringstream ss(v);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok = trim_copy(tok);
            if (tok.empty()) continue;
            const size_t x = tok.find('x');
            if (x == std::string::npos)
                throw ConfigError("size entry '" + tok + "' must look like 8x16");
            out.emplace_back(parse_scalar(tok.substr(0, x)), parse_scalar(tok.substr(x + 1)));
        }
        if (out.empty()) throw ConfigError("empty size list for key '" + key + "'");
        return out;
    }

    std::string serialize() const {
        std::string out;
        for (const auto& [k, v] : items) {
            out += k;
            out += " = ";
            out += v;
            out += '\n';
        }
        return out;
    }

    static Config parse(std::istream& in) {
        Config c;
        std::string line;
        long lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const size_t hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim_copy(line);
            if (line.empty()) continue;
            const size_t eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": expected 'key = value', got '" + line + "'");
            std::string key = trim_copy(line.substr(0, eq));
            std::string value = trim_copy(line.substr(eq + 1));
            if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
            if (c.has(key)) throw ConfigError("duplicate config key '" + key + "'");
            c.items.emplace_back(std::move(key), std::move(value));
        }
        return c;
    }

    static Config parse_string(const std::string& text) {
        std::istringstream ss(text);
        return parse(ss);
    }

    static Config parse_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
        return parse(in);
    }
};

// Derives nu either from an explicit key or from a material block
// (exchange length, quality factor, thickness, all in nm).
inline std::vector<double> resolve_nu_list(const Config& cfg) {
    const bool physical = cfg.has("physical.exchange_length_nm") ||
                          cfg.has("physical.quality_factor") || cfg.has("physical.thickness_nm");
    if (cfg.has("nu") && physical)
        throw ConfigError("give either nu or a physical.* block, not both");
    if (cfg.has("nu")) {
        auto nus = cfg.number_list("nu");
        for (double v : nus)
            if (!(v >= 0.0)) throw ConfigError("nu must be nonnegative");
        return nus;
    }
    if (physical) {
        PhysicalParams p;
        p.exchange_length_nm = cfg.number_or("physical.exchange_length_nm", p.exchange_length_nm);
        p.quality_factor = cfg.number_or("physical.quality_factor", p.quality_factor);
        p.thickness_nm = cfg.number_or("physical.thickness_nm", p.thickness_nm);
        return {p.nu()};
    }
    throw ConfigError("missing required config key 'nu'");
}

inline uint64_t fnv1a(const void* data, size_t n, uint64_t h = 0xcbf29ce484222325ULL) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string fnv1a_hex(const std::string& bytes) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a(bytes.data(), bytes.size())));
    return std::string(buf);
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

inline void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
    static std::atomic<unsigned long> counter{0};
    std::filesystem::path tmp = path;
    tmp += ".tmp" + std::to_string(counter.fetch_add(1));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw PreconditionError("cannot open '" + tmp.string() + "' for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) throw PreconditionError("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

inline std::string read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PreconditionError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string csv_table(const std::vector<std::string>& header,
                             const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (size_t i = 0; i < header.size(); ++i) {
        if (i) out += ',';
        out += header[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

// Flat binary grid container.  Exactly eight '\n'-terminated ASCII header
// lines, then the raw float64 payload; byte layout in docs/formats.md.
inline std::string encode_field_binary(const std::string& kind, int nx, int ny, double h,
                                       double x0, double y0, const std::vector<double>& data) {
    if (data.size() != static_cast<size_t>(nx) * static_cast<size_t>(ny))
        throw PreconditionError("field payload size mismatch");
    std::string out;
    out += "fourfold-grid-binary v1\n";
    out += "kind " + kind + "\n";
    out += "nx " + std::to_string(nx) + " ny " + std::to_string(ny) + "\n";
    out += "h " + format_double(h) + "\n";
    out += "origin " + format_double(x0) + " " + format_double(y0) + "\n";
    out += "scalar float64 endian little order row-major\n";
    out += "payload_bytes " + std::to_string(data.size() * sizeof(double)) + "\n";
    out += "end-header\n";
    const size_t head = out.size();
    out.resize(head + data.size() * sizeof(double));
    std::memcpy(out.data() + head, data.data(), data.size() * sizeof(double));
    return out;
}

struct DecodedField {
    std::string kind;
    int nx = 0, ny = 0;
    double h = 0.0, x0 = 0.0, y0 = 0.0;
    std::vector<double> data;
};

inline DecodedField decode_field_binary(const std::string& bytes) {
    size_t pos = 0;
    std::vector<std::string> lines;
    for (int k = 0; k < 8; ++k) {
        const size_t nl = bytes.find('\n', pos);
        if (nl == std::string::npos) throw PreconditionError("truncated grid header");
        lines.push_back(bytes.substr(pos, nl - pos));
        pos = nl + 1;
    }
    if (lines[0] != "fourfold-grid-binary v1") throw PreconditionError("bad grid magic line");
    DecodedField f;
    std::istringstream l1(lines[1]), l2(lines[2]), l3(lines[3]), l4(lines[4]), l6(lines[6]);
    std::string tag, tag2;
    l1 >> tag >> f.kind;
    if (tag != "kind") throw PreconditionError("bad grid header line 2");
    l2 >> tag >> f.nx >> tag2 >> f.ny;
    if (tag != "nx" || tag2 != "ny" || f.nx <= 0 || f.ny <= 0)
        throw PreconditionError("bad grid header line 3");
    l3 >> tag >> f.h;
    if (tag != "h") throw PreconditionError("bad grid header line 4");
    l4 >> tag >> f.x0 >> f.y0;
    if (tag != "origin") throw PreconditionError("bad grid header line 5");
    if (lines[5] != "scalar float64 endian little order row-major")
        throw PreconditionError("unsupported grid payload encoding");
    size_t nbytes = 0;
    l6 >> tag >> nbytes;
    if (tag != "payload_bytes") throw PreconditionError("bad grid header line 7");
    if (lines[7] != "end-header") throw PreconditionError("bad grid header line 8");
    const size_t count = static_cast<size_t>(f.nx) * static_cast<size_t>(f.ny);
    if (nbytes != count * sizeof(double) || bytes.size() - pos != nbytes)
        throw PreconditionError("grid payload size mismatch");
    f.data.resize(count);
    std::memcpy(f.data.data(), bytes.data() + pos, nbytes);
    return f;
}

inline void write_field_binary(const std::filesystem::path& path, const AngleField1D& f) {
    write_file_atomic(path, encode_field_binary("theta1d", static_cast<int>(f.n()), 1,
                                                f.grid.h, f.grid.x0, 0.0, f.theta));
}

inline void write_field_binary(const std::filesystem::path& path, const AngleField2D& f) {
    write_file_atomic(path, encode_field_binary("theta2d", f.grid.nx, f.grid.ny, f.grid.h,
                                                0.0, 0.0, f.theta));
}

inline AngleField1D read_field_binary_1d(const std::filesystem::path& path) {
    const DecodedField d = decode_field_binary(read_file_bytes(path));
    if (d.kind != "theta1d" || d.ny != 1) throw PreconditionError("not a 1d theta grid");
    AngleField1D f(Grid1D(d.nx, d.h, d.x0));
    f.theta = d.data;
    return f;
}

inline AngleField2D read_field_binary_2d(const std::filesystem::path& path) {
    const DecodedField d = decode_field_binary(read_file_bytes(path));
    if (d.kind != "theta2d") throw PreconditionError("not a 2d theta grid");
    AngleField2D f(Grid2D(d.nx, d.ny, d.h));
    f.theta = d.data;
    return f;
}

// Recipe values as written in configs: monodomain(pi/3), half_split(pi,0),
// half_split_vertical(pi/2,-pi/2), tanh_wall, two_wall(12).
inline InitRecipe parse_init_recipe(const std::string& text) {
    std::string s = trim_copy(text);
    std::string name = s;
    std::vector<double> args;
    const size_t open = s.find('(');
    if (open != std::string::npos) {
        if (s.back() != ')') throw ConfigError("unterminated init recipe '" + text + "'");
        name = trim_copy(s.substr(0, open));
        std::string inner = s.substr(open + 1, s.size() - open - 2);
        std::stringstream ss(inner);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok = trim_copy(tok);
            if (!tok.empty()) args.push_back(parse_scalar(tok));
        }
    }
    InitRecipe r;
    const auto want = [&](size_t lo, size_t hi) {
        if (args.size() < lo || args.size() > hi)
            throw ConfigError("init recipe '" + name + "' given " + std::to_string(args.size()) +
                              " arguments");
    };
    if (name == "monodomain") {
        want(1, 1);
        r.kind = InitRecipe::Kind::monodomain;
        r.a = args[0];
    } else if (name == "half_split") {
        want(2, 2);
        r.kind = InitRecipe::Kind::half_split;
        r.a = args[0];
        r.b = args[1];
    } else if (name == "half_split_vertical") {
        want(2, 2);
        r.kind = InitRecipe::Kind::half_split_vertical;
        r.a = args[0];
        r.b = args[1];
    } else if (name == "tanh_wall") {
        want(0, 1);
        r.kind = InitRecipe::Kind::tanh_wall;
        r.a = args.empty() ? 0.0 : args[0];
    } else if (name == "two_wall") {
        want(0, 1);
        r.kind = InitRecipe::Kind::two_wall;
        r.a = args.empty() ? 8.0 : args[0];
    } else {
        throw ConfigError("unknown init recipe '" + name + "'");
    }
    return r;
}

inline std::string init_recipe_text(const InitRecipe& r) {
    switch (r.kind) {
        case InitRecipe::Kind::monodomain: return "monodomain(" + format_double(r.a) + ")";
        case InitRecipe::Kind::half_split:
            return "half_split(" + format_double(r.a) + "," + format_double(r.b) + ")";
        case InitRecipe::Kind::half_split_vertical:
            return "half_split_vertical(" + format_double(r.a) + "," + format_double(r.b) + ")";
        case InitRecipe::Kind::tanh_wall: return "tanh_wall(" + format_double(r.a) + ")";
        default: return "two_wall(" + format_double(r.a) + ")";
    }
}

struct OutputRecord {
    std::string path;
    uint64_t bytes = 0;
    std::string hash;
};

struct RunManifest {
    std::string tool = "fourfold";
    std::string version = "1.0.0";
    std::string command;
    Config resolved;
    std::string grid_descriptor;
    uint64_t seed = 0;
    long steps = 0;
    std::string termination;
    double final_energy = 0.0;
    double final_residual = 0.0;
    double wall_clock_sec = 0.0;
    std::vector<OutputRecord> outputs;

    std::string config_hash() const { return fnv1a_hex(resolved.serialize()); }

    void record_output(const std::filesystem::path& dir, const std::string& name,
                       const std::string& bytes) {
        write_file_atomic(dir / name, bytes);
        outputs.push_back({name, bytes.size(), fnv1a_hex(bytes)});
    }

    std::string to_json() const {
        nlohmann::json j;
        j["tool"] = tool;
        j["version"] = version;
        j["command"] = command;
        nlohmann::json cfg = nlohmann::json::object();
        for (const auto& [k, v] : resolved.items) cfg[k] = v;
        j["config"] = cfg;
        j["config_hash"] = config_hash();
        j["grid"] = grid_descriptor;
        j["seed"] = seed;
        j["steps"] = steps;
        j["termination"] = termination;
        j["final_energy"] = final_energy;
        j["final_residual"] = final_residual;
        j["wall_clock_sec"] = wall_clock_sec;
        j["outputs"] = nlohmann::json::array();
        for (const auto& o : outputs)
            j["outputs"].push_back({{"path", o.path}, {"bytes", o.bytes}, {"fnv1a", o.hash}});
        return j.dump(2) + "\n";
    }

    void write(const std::filesystem::path& dir, const std::string& name = "manifest.json") const {
        write_file_atomic(dir / name, to_json());
    }
};

} // namespace fourfold
