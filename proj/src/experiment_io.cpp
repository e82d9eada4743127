#include "fkdv/experiment_io.hpp"

#include "fkdv/errors.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace fkdv {

SolverConfig ExperimentConfig::solver_config() const {
    SolverConfig c;
    c.alpha = alpha;
    c.dt = dt;
    c.t_final = t_final;
    c.dealias = dealias;
    c.contamination_threshold = contamination_threshold;
    c.output_cadence = output.cadence;
    if (scheme == "etdrk4") {
        c.scheme = Scheme::Etdrk4;
    } else if (scheme == "imex2") {
        c.scheme = Scheme::Imex2;
    } else {
        throw ConfigError("unknown scheme '" + scheme + "' (expected etdrk4 or imex2)");
    }
    return c;
}

// ----------------------------------------------------------- INI parsing ---

namespace {

struct RawConfig {
    // section -> key -> value; [window] may repeat, collected separately
    std::map<std::string, std::map<std::string, std::string>> sections;
    std::vector<std::map<std::string, std::string>> windows;
};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

RawConfig tokenize(const std::string& text) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line;
    std::string section;
    bool in_window = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                std::ostringstream os;
                os << "line " << lineno << ": unterminated section header";
                throw FormatError(os.str());
            }
            section = trim(line.substr(1, line.size() - 2));
            in_window = (section == "window");
            if (in_window) raw.windows.emplace_back();
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::ostringstream os;
            os << "line " << lineno << ": expected key = value";
            throw FormatError(os.str());
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            std::ostringstream os;
            os << "line " << lineno << ": empty key";
            throw FormatError(os.str());
        }
        if (section.empty()) {
            std::ostringstream os;
            os << "line " << lineno << ": key outside any [section]";
            throw FormatError(os.str());
        }
        if (in_window) {
            raw.windows.back()[key] = value;
        } else {
            raw.sections[section][key] = value;
        }
    }
    return raw;
}

double parse_double(const std::string& v, const std::string& where) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw FormatError("cannot parse number '" + v + "' for " + where);
    }
}

std::uint64_t parse_u64(const std::string& v, const std::string& where) {
    try {
        std::size_t pos = 0;
        const unsigned long long d = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw FormatError("cannot parse integer '" + v + "' for " + where);
    }
}

bool parse_bool(const std::string& v, const std::string& where) {
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    throw FormatError("cannot parse boolean '" + v + "' for " + where);
}

template <typename T, typename F>
void take(const std::map<std::string, std::string>& kv, const std::string& key, T& out, F&& conv) {
    auto it = kv.find(key);
    if (it != kv.end()) out = conv(it->second, key);
}

void validate_config(const ExperimentConfig& c) {
    std::vector<std::string> violations;
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) violations.push_back("0 < alpha < 1");
    if (c.n_points < 8 || c.n_points % 2 != 0) violations.push_back("n_points even and >= 8");
    if (!(c.half_length > 0.0)) violations.push_back("half_length > 0");
    if (!(c.dt > 0.0)) violations.push_back("dt > 0");
    if (!(c.t_final >= 0.0)) violations.push_back("t_final >= 0");
    if (c.scheme != "etdrk4" && c.scheme != "imex2") violations.push_back("scheme in {etdrk4, imex2}");
    if (c.m < 2) violations.push_back("m >= 2");
    if (c.initial_data.kind != "gaussian" && c.initial_data.kind != "one_sided")
        violations.push_back("initial_data.kind in {gaussian, one_sided}");
    if (c.initial_data.mollify_mu < 0.0) violations.push_back("mollify_mu >= 0");
    if (c.output.cadence == 0) violations.push_back("output.cadence >= 1");
    for (std::size_t i = 0; i < c.windows.size(); ++i) {
        const auto& w = c.windows[i];
        std::ostringstream tag;
        tag << "window " << i << ": ";
        if (!(w.epsilon > 0.0)) violations.push_back(tag.str() + "epsilon > 0");
        if (w.b < 5.0 * w.epsilon) violations.push_back(tag.str() + "b >= 5*epsilon");
        if (!(w.tau > 4.0 * w.epsilon)) violations.push_back(tag.str() + "tau > 4*epsilon");
        if (w.v < 0.0) violations.push_back(tag.str() + "v >= 0");
    }
    if (!violations.empty()) {
        std::ostringstream os;
        os << "configuration violates " << violations.size() << " constraint(s):";
        for (const auto& v : violations) os << "\n  - " << v;
        throw ConfigError(os.str());
    }
}

} // namespace

ExperimentConfig parse_config(const std::string& text) {
    const RawConfig raw = tokenize(text);
    ExperimentConfig c;
    auto to_d = [](const std::string& v, const std::string& k) { return parse_double(v, k); };
    auto to_u = [](const std::string& v, const std::string& k) { return parse_u64(v, k); };
    auto to_b = [](const std::string& v, const std::string& k) { return parse_bool(v, k); };
    auto to_s = [](const std::string& v, const std::string&) { return v; };

    if (auto it = raw.sections.find("model"); it != raw.sections.end()) {
        take(it->second, "alpha", c.alpha, to_d);
        take(it->second, "seed", c.seed, to_u);
    }
    if (auto it = raw.sections.find("grid"); it != raw.sections.end()) {
        std::uint64_t n = c.n_points;
        take(it->second, "n_points", n, to_u);
        c.n_points = static_cast<std::size_t>(n);
        take(it->second, "half_length", c.half_length, to_d);
    }
    if (auto it = raw.sections.find("solver"); it != raw.sections.end()) {
        take(it->second, "dt", c.dt, to_d);
        take(it->second, "t_final", c.t_final, to_d);
        take(it->second, "scheme", c.scheme, to_s);
        take(it->second, "dealias", c.dealias, to_b);
        take(it->second, "contamination_threshold", c.contamination_threshold, to_d);
    }
    if (auto it = raw.sections.find("initial_data"); it != raw.sections.end()) {
        take(it->second, "kind", c.initial_data.kind, to_s);
        take(it->second, "amplitude", c.initial_data.amplitude, to_d);
        take(it->second, "width", c.initial_data.width, to_d);
        take(it->second, "center", c.initial_data.center, to_d);
        take(it->second, "gamma", c.initial_data.gamma, to_d);
        take(it->second, "x_s", c.initial_data.x_s, to_d);
        take(it->second, "bump_radius", c.initial_data.bump_radius, to_d);
        take(it->second, "mollify_mu", c.initial_data.mollify_mu, to_d);
    }
    if (auto it = raw.sections.find("ladder"); it != raw.sections.end()) {
        std::uint64_t m = static_cast<std::uint64_t>(c.m);
        take(it->second, "m", m, to_u);
        c.m = static_cast<int>(m);
    }
    if (auto it = raw.sections.find("output"); it != raw.sections.end()) {
        std::uint64_t cad = c.output.cadence;
        take(it->second, "cadence", cad, to_u);
        c.output.cadence = static_cast<std::size_t>(cad);
        take(it->second, "directory", c.output.directory, to_s);
        std::string formats;
        take(it->second, "formats", formats, to_s);
        if (!formats.empty()) {
            c.output.formats.clear();
            std::istringstream fs(formats);
            std::string tok;
            while (std::getline(fs, tok, ',')) c.output.formats.push_back(trim(tok));
        }
    }
    for (const auto& w : raw.windows) {
        DiagnosticWindow win;
        take(w, "x0", win.x0, to_d);
        take(w, "epsilon", win.epsilon, to_d);
        take(w, "b", win.b, to_d);
        take(w, "tau", win.tau, to_d);
        take(w, "v", win.v, to_d);
        c.windows.push_back(win);
    }
    validate_config(c);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

namespace {
std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
} // namespace

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "[model]\n"
       << "alpha = " << fmt_double(c.alpha) << "\n"
       << "seed = " << c.seed << "\n\n"
       << "[grid]\n"
       << "n_points = " << c.n_points << "\n"
       << "half_length = " << fmt_double(c.half_length) << "\n\n"
       << "[solver]\n"
       << "dt = " << fmt_double(c.dt) << "\n"
       << "t_final = " << fmt_double(c.t_final) << "\n"
       << "scheme = " << c.scheme << "\n"
       << "dealias = " << (c.dealias ? "true" : "false") << "\n"
       << "contamination_threshold = " << fmt_double(c.contamination_threshold) << "\n\n"
       << "[initial_data]\n"
       << "kind = " << c.initial_data.kind << "\n"
       << "amplitude = " << fmt_double(c.initial_data.amplitude) << "\n"
       << "width = " << fmt_double(c.initial_data.width) << "\n"
       << "center = " << fmt_double(c.initial_data.center) << "\n"
       << "gamma = " << fmt_double(c.initial_data.gamma) << "\n"
       << "x_s = " << fmt_double(c.initial_data.x_s) << "\n"
       << "bump_radius = " << fmt_double(c.initial_data.bump_radius) << "\n"
       << "mollify_mu = " << fmt_double(c.initial_data.mollify_mu) << "\n\n"
       << "[ladder]\n"
       << "m = " << c.m << "\n\n"
       << "[output]\n"
       << "cadence = " << c.output.cadence << "\n"
       << "directory = " << c.output.directory << "\n"
       << "formats = ";
    for (std::size_t i = 0; i < c.output.formats.size(); ++i)
        os << (i ? "," : "") << c.output.formats[i];
    os << "\n";
    for (const auto& w : c.windows) {
        os << "\n[window]\n"
           << "x0 = " << fmt_double(w.x0) << "\n"
           << "epsilon = " << fmt_double(w.epsilon) << "\n"
           << "b = " << fmt_double(w.b) << "\n"
           << "tau = " << fmt_double(w.tau) << "\n"
           << "v = " << fmt_double(w.v) << "\n";
    }
    return os.str();
}

bool config_equal(const ExperimentConfig& a, const ExperimentConfig& b) {
    return serialize_config(a) == serialize_config(b);
}

std::filesystem::path resolve_output_dir(const OutputSpec& spec) {
    if (const char* env = std::getenv("FKDV_OUTPUT_DIR"); env && *env)
        return std::filesystem::path(env);
    return std::filesystem::path(spec.directory);
}

// -------------------------------------------------------------- snapshots ---

namespace {

constexpr char kMagic[4] = {'F', 'K', 'D', 'V'};

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_f64(std::string& out, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    put_u64(out, bits);
}

struct Reader {
    const unsigned char* p;
    const unsigned char* end;
    void need(std::size_t n, const char* what) {
        if (static_cast<std::size_t>(end - p) < n)
            throw FormatError(std::string("snapshot truncated while reading ") + what);
    }
    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
        p += 4;
        return v;
    }
    std::uint64_t u64(const char* what) {
        need(8, what);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
        p += 8;
        return v;
    }
    double f64(const char* what) {
        const std::uint64_t bits = u64(what);
        double d;
        std::memcpy(&d, &bits, 8);
        return d;
    }
};

} // namespace

void write_snapshot(const Snapshot& snap, const std::filesystem::path& path) {
    std::string out;
    out.reserve(44 + 8 * snap.values.size());
    out.append(kMagic, 4);
    put_u32(out, snap.version);
    put_u64(out, snap.n_points);
    put_f64(out, snap.half_length);
    put_f64(out, snap.alpha);
    put_f64(out, snap.t);
    put_u64(out, snap.step_count);
    for (double v : snap.values) put_f64(out, v);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw FormatError("cannot open snapshot for writing: " + path.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw FormatError("short write on snapshot: " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open snapshot: " + path.string());
    std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    Reader r{reinterpret_cast<const unsigned char*>(data.data()),
             reinterpret_cast<const unsigned char*>(data.data()) + data.size()};
    r.need(4, "magic");
    if (std::memcmp(r.p, kMagic, 4) != 0)
        throw FormatError("bad snapshot magic (expected FKDV): " + path.string());
    r.p += 4;
    Snapshot snap;
    snap.version = r.u32("version");
    if (snap.version != 1) {
        std::ostringstream os;
        os << "unsupported snapshot version " << snap.version;
        throw FormatError(os.str());
    }
    snap.n_points = r.u64("n_points");
    snap.half_length = r.f64("half_length");
    snap.alpha = r.f64("alpha");
    snap.t = r.f64("t");
    snap.step_count = r.u64("step_count");
    snap.values.resize(snap.n_points);
    r.need(8 * snap.n_points, "payload");
    for (std::uint64_t i = 0; i < snap.n_points; ++i) snap.values[i] = r.f64("payload");
    if (r.p != r.end) throw FormatError("snapshot has trailing bytes: " + path.string());
    return snap;
}

Snapshot make_snapshot(const SolverState& state, double alpha) {
    Snapshot snap;
    snap.n_points = state.u.size();
    snap.half_length = state.u.grid().half_length();
    snap.alpha = alpha;
    snap.t = state.t;
    snap.step_count = state.step_count;
    snap.values.assign(state.u.values().begin(), state.u.values().end());
    return snap;
}

SolverState state_from_snapshot(const Snapshot& snap) {
    GridPtr g = make_grid(static_cast<std::size_t>(snap.n_points), snap.half_length);
    SolverState st{snap.t, Field(g, std::vector<double>(snap.values)),
                   static_cast<std::size_t>(snap.step_count), {}, 0.0, 0.0, false};
    return st;
}

// ----------------------------------------------------------------- output ---

void write_csv(const std::filesystem::path& path, const std::vector<double>& t,
               const std::vector<std::pair<std::string, std::vector<double>>>& columns) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw FormatError("cannot open CSV for writing: " + path.string());
    f << "t";
    for (const auto& [name, _] : columns) f << "," << name;
    f << "\n";
    for (std::size_t i = 0; i < t.size(); ++i) {
        f << fmt_double(t[i]);
        for (const auto& [_, col] : columns) f << "," << fmt_double(col.at(i));
        f << "\n";
    }
}

JsonlWriter::JsonlWriter(const std::filesystem::path& path) : path_(path) {
    std::ofstream f(path_, std::ios::trunc); // start fresh
    if (!f) throw FormatError("cannot open report for writing: " + path_.string());
}

void JsonlWriter::write_line(const std::string& json_object) {
    std::ofstream f(path_, std::ios::app);
    f << json_object << "\n";
}

} // namespace fkdv
