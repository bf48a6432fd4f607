#include "nlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nlab/errors.hpp"

namespace nlab {

const char* to_string(Mode m) {
    switch (m) {
        case Mode::subcritical: return "subcritical";
        case Mode::critical: return "critical";
        case Mode::bn: return "bn";
    }
    return "?";
}

const char* to_string(Strictness s) {
    return s == Strictness::strict ? "strict" : "lab";
}

Mode mode_from_string(const std::string& s) {
    if (s == "subcritical") return Mode::subcritical;
    if (s == "critical") return Mode::critical;
    if (s == "bn") return Mode::bn;
    throw SpecError("unknown mode: " + s);
}

Strictness strictness_from_string(const std::string& s) {
    if (s == "strict") return Strictness::strict;
    if (s == "lab") return Strictness::lab;
    throw SpecError("unknown strictness: " + s);
}

WeightSpec WeightSpec::constant(double c) {
    WeightSpec w;
    w.kind = Kind::constant;
    w.value = c;
    return w;
}

namespace {

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::array<double, 3> parse_triplet(const std::string& s) {
    std::array<double, 3> out{0, 0, 0};
    std::stringstream in(s);
    std::string part;
    int i = 0;
    while (std::getline(in, part, ',') && i < 3) out[i++] = std::stod(part);
    return out;
}

} // namespace

WeightSpec WeightSpec::parse(const std::string& text) {
    auto toks = split_ws(text);
    if (toks.empty()) throw SpecError("empty weight spec");
    WeightSpec w;
    auto need = [&](const std::string& key) -> std::string {
        for (std::size_t i = 1; i < toks.size(); ++i) {
            auto eq = toks[i].find('=');
            if (eq != std::string::npos && toks[i].substr(0, eq) == key)
                return toks[i].substr(eq + 1);
        }
        throw SpecError("weight spec missing " + key + ": " + text);
    };
    auto opt = [&](const std::string& key, const std::string& dflt) -> std::string {
        for (std::size_t i = 1; i < toks.size(); ++i) {
            auto eq = toks[i].find('=');
            if (eq != std::string::npos && toks[i].substr(0, eq) == key)
                return toks[i].substr(eq + 1);
        }
        return dflt;
    };
    const std::string& kind = toks[0];
    if (kind == "constant") {
        w.kind = Kind::constant;
        w.value = std::stod(need("value"));
    } else if (kind == "sinusoid") {
        w.kind = Kind::sinusoid;
        w.amplitude = std::stod(opt("amp", "1"));
        w.offset = std::stod(opt("offset", "0"));
        w.freq = parse_triplet(opt("freq", "1,0,0"));
        w.phase = parse_triplet(opt("phase", "0,0,0"));
    } else if (kind == "bump") {
        w.kind = Kind::bump;
        w.center = parse_triplet(need("center"));
        w.radius = std::stod(need("radius"));
        w.amplitude = std::stod(opt("amp", "1"));
        w.offset = std::stod(opt("offset", "0"));
    } else if (kind == "step") {
        w.kind = Kind::step;
        w.axis = std::stoi(opt("axis", "0"));
        w.threshold = std::stod(need("threshold"));
        w.width = std::stod(opt("width", "0.1"));
        w.low = std::stod(need("low"));
        w.high = std::stod(need("high"));
    } else {
        throw SpecError("unknown weight kind: " + kind);
    }
    return w;
}

std::string WeightSpec::describe() const {
    std::ostringstream out;
    switch (kind) {
        case Kind::constant:
            out << "constant value=" << value;
            break;
        case Kind::sinusoid:
            out << "sinusoid amp=" << amplitude << " offset=" << offset << " freq=" << freq[0]
                << ',' << freq[1] << ',' << freq[2] << " phase=" << phase[0] << ',' << phase[1]
                << ',' << phase[2];
            break;
        case Kind::bump:
            out << "bump center=" << center[0] << ',' << center[1] << ',' << center[2]
                << " radius=" << radius << " amp=" << amplitude << " offset=" << offset;
            break;
        case Kind::step:
            out << "step axis=" << axis << " threshold=" << threshold << " width=" << width
                << " low=" << low << " high=" << high;
            break;
        case Kind::table:
            out << "table n=" << table.size();
            break;
    }
    return out.str();
}

namespace {

void check_positive(std::vector<std::string>& out, const char* name, double v) {
    if (!(v > 0) || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << name << " = " << v << " must be positive";
        out.push_back(msg.str());
    }
}

} // namespace

std::vector<std::string> validate_config(const ProblemConfig& cfg) {
    std::vector<std::string> v;
    std::ostringstream msg;
    auto push = [&](const std::ostringstream& m) { v.push_back(m.str()); };

    if (cfg.dim_N < 2) {
        std::ostringstream m;
        m << "N = " << cfg.dim_N << " < 2";
        push(m);
    }
    if (cfg.grid_n < 2) {
        std::ostringstream m;
        m << "grid_n = " << cfg.grid_n << " < 2";
        push(m);
    }
    for (int a = 0; a < std::min(cfg.dim_N, 3); ++a) {
        if (!(cfg.domain_side[a] > 0)) {
            std::ostringstream m;
            m << "domain side[" << a << "] = " << cfg.domain_side[a] << " <= 0";
            push(m);
        }
    }
    if (!(cfg.p > 1)) {
        std::ostringstream m;
        m << "p = " << cfg.p << " <= 1";
        push(m);
    }
    if (!(cfg.q > 1)) {
        std::ostringstream m;
        m << "q = " << cfg.q << " <= 1";
        push(m);
    }
    if (!(cfg.s > 0 && cfg.s < 1)) {
        std::ostringstream m;
        m << "s = " << cfg.s << " outside (0,1)";
        push(m);
    }

    if (cfg.strictness == Strictness::lab) {
        if (cfg.lambda < 0) {
            std::ostringstream m;
            m << "lambda = " << cfg.lambda << " < 0";
            push(m);
        }
        return v;
    }

    check_positive(v, "lambda", cfg.lambda);
    check_positive(v, "delta", cfg.delta);
    check_positive(v, "r", cfg.r);

    const double sq = cfg.s * cfg.q;
    if (!(sq < cfg.p)) {
        std::ostringstream m;
        m << "s*q = " << sq << " >= p = " << cfg.p;
        push(m);
    }
    if (!(cfg.p < cfg.dim_N)) {
        std::ostringstream m;
        m << "p = " << cfg.p << " >= N = " << cfg.dim_N;
        push(m);
    }
    const double minpq = std::min(cfg.p, cfg.q);
    if (!(cfg.delta > 1)) {
        std::ostringstream m;
        m << "delta = " << cfg.delta << " <= 1";
        push(m);
    }
    if (!(cfg.delta < minpq)) {
        std::ostringstream m;
        m << "delta = " << cfg.delta << " >= min{p,q} = " << minpq;
        push(m);
    }
    if (cfg.p < cfg.dim_N) {  // exponents well-defined only then
        const double pst = cfg.p_star();
        const double qst = cfg.q_star_s();
        const double rmax = std::max(pst, qst);
        if (!(std::max(cfg.p, cfg.q) <= cfg.r)) {
            std::ostringstream m;
            m << "r = " << cfg.r << " < max{p,q} = " << std::max(cfg.p, cfg.q);
            push(m);
        }
        if (!(cfg.r <= rmax)) {
            std::ostringstream m;
            m << "r = " << cfg.r << " > max{p*,q*_s} = " << rmax;
            push(m);
        }
        if (cfg.mode == Mode::subcritical) {
            if (!(cfg.p < cfg.q)) {
                std::ostringstream m;
                m << "subcritical mode needs p < q but p = " << cfg.p << ", q = " << cfg.q;
                push(m);
            }
            if (!(cfg.r < rmax)) {
                std::ostringstream m;
                m << "subcritical mode needs r < max{p*,q*_s} but r = " << cfg.r
                  << ", max = " << rmax;
                push(m);
            }
        } else {
            if (!(cfg.q < cfg.p)) {
                std::ostringstream m;
                m << to_string(cfg.mode) << " mode needs q < p but p = " << cfg.p
                  << ", q = " << cfg.q;
                push(m);
            }
            if (std::abs(cfg.r - pst) > 1e-12 * pst) {
                std::ostringstream m;
                m << to_string(cfg.mode) << " mode needs r = p* = " << pst << " but r = " << cfg.r;
                push(m);
            }
        }
    }
    (void)msg;
    return v;
}

namespace {

const char* kKnownKeys[] = {"dim_N",  "p",          "q",           "s",        "delta",
                            "r",      "lambda",     "mode",        "strictness", "domain_lo",
                            "domain_side", "grid_n", "weight_a",   "weight_b"};

bool known_key(const std::string& k) {
    for (auto* s : kKnownKeys)
        if (k == s) return true;
    return false;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    auto e = s.find_last_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

} // namespace

ProblemConfig parse_config_text(const std::string& text) {
    ProblemConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw SpecError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (!known_key(key))
            throw SpecError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (key == "dim_N") cfg.dim_N = std::stoi(val);
        else if (key == "p") cfg.p = std::stod(val);
        else if (key == "q") cfg.q = std::stod(val);
        else if (key == "s") cfg.s = std::stod(val);
        else if (key == "delta") cfg.delta = std::stod(val);
        else if (key == "r") cfg.r = std::stod(val);
        else if (key == "lambda") cfg.lambda = std::stod(val);
        else if (key == "mode") cfg.mode = mode_from_string(val);
        else if (key == "strictness") cfg.strictness = strictness_from_string(val);
        else if (key == "domain_lo") cfg.domain_lo = parse_triplet(val);
        else if (key == "domain_side") cfg.domain_side = parse_triplet(val);
        else if (key == "grid_n") cfg.grid_n = std::stoi(val);
        else if (key == "weight_a") cfg.weight_a = WeightSpec::parse(val);
        else if (key == "weight_b") cfg.weight_b = WeightSpec::parse(val);
    }
    return cfg;
}

ProblemConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string dump_config(const ProblemConfig& cfg) {
    std::ostringstream out;
    out << "dim_N = " << cfg.dim_N << "\n"
        << "p = " << cfg.p << "\n"
        << "q = " << cfg.q << "\n"
        << "s = " << cfg.s << "\n"
        << "delta = " << cfg.delta << "\n"
        << "r = " << cfg.r << "\n"
        << "lambda = " << cfg.lambda << "\n"
        << "mode = " << to_string(cfg.mode) << "\n"
        << "strictness = " << to_string(cfg.strictness) << "\n"
        << "domain_lo = " << cfg.domain_lo[0] << ',' << cfg.domain_lo[1] << ',' << cfg.domain_lo[2]
        << "\n"
        << "domain_side = " << cfg.domain_side[0] << ',' << cfg.domain_side[1] << ','
        << cfg.domain_side[2] << "\n"
        << "grid_n = " << cfg.grid_n << "\n"
        << "weight_a = " << cfg.weight_a.describe() << "\n"
        << "weight_b = " << cfg.weight_b.describe() << "\n";
    return out.str();
}

} // namespace nlab
