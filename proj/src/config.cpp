#include "pasguide/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "pasguide/errors.hpp"

namespace pasguide {

bool operator==(const RunConfig& a, const RunConfig& b) {
    const GuidanceConfig& ga = a.guidance;
    const GuidanceConfig& gb = b.guidance;
    return ga.T == gb.T && ga.N == gb.N && ga.s == gb.s && ga.lambda_exp == gb.lambda_exp &&
           ga.lambda_ref == gb.lambda_ref && ga.lambda_stru == gb.lambda_stru &&
           ga.enable_exp == gb.enable_exp && ga.enable_ref == gb.enable_ref &&
           ga.enable_stru == gb.enable_stru && ga.injection_mode == gb.injection_mode &&
           ga.retinex_grad_mode == gb.retinex_grad_mode && ga.exposure_base == gb.exposure_base &&
           ga.exposure_amplitude == gb.exposure_amplitude && ga.seed == gb.seed &&
           a.beta_start == b.beta_start && a.beta_end == b.beta_end && a.predictor == b.predictor &&
           a.gallery == b.gallery && a.reference == b.reference && a.restorer == b.restorer &&
           a.unsharp_amount == b.unsharp_amount && a.unsharp_sigma == b.unsharp_sigma &&
           a.threads == b.threads;
}

const char* injection_mode_name(InjectionMode mode) {
    return mode == InjectionMode::Sasi ? "sasi" : "mse";
}

const char* retinex_grad_mode_name(RetinexGradMode mode) {
    return mode == RetinexGradMode::Frozen ? "frozen" : "full";
}

InjectionMode parse_injection_mode(const std::string& name) {
    if (name == "sasi") return InjectionMode::Sasi;
    if (name == "mse") return InjectionMode::Mse;
    throw InvalidInputError("injection_mode must be sasi or mse, got '" + name + "'");
}

RetinexGradMode parse_retinex_grad_mode(const std::string& name) {
    if (name == "frozen") return RetinexGradMode::Frozen;
    if (name == "full") return RetinexGradMode::Full;
    throw InvalidInputError("retinex_grad_mode must be frozen or full, got '" + name + "'");
}

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw InvalidInputError("config key '" + key + "': expected boolean, got '" + value + "'");
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw InvalidInputError("config key '" + key + "': expected number, got '" + value + "'");
    }
}

long parse_long(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw InvalidInputError("config key '" + key + "': expected integer, got '" + value + "'");
    }
}

}  // namespace

RunConfig parse_config(const std::map<std::string, std::string>& kv, RunConfig cfg) {
    for (const auto& [key, value] : kv) {
        GuidanceConfig& g = cfg.guidance;
        if (key == "T") {
            g.T = static_cast<int>(parse_long(key, value));
        } else if (key == "N") {
            g.N = static_cast<int>(parse_long(key, value));
        } else if (key == "s") {
            g.s = parse_double(key, value);
        } else if (key == "lambda_exp") {
            g.lambda_exp = parse_double(key, value);
        } else if (key == "lambda_ref") {
            g.lambda_ref = parse_double(key, value);
        } else if (key == "lambda_stru") {
            g.lambda_stru = parse_double(key, value);
        } else if (key == "enable_exp") {
            g.enable_exp = parse_bool(key, value);
        } else if (key == "enable_ref") {
            g.enable_ref = parse_bool(key, value);
        } else if (key == "enable_stru") {
            g.enable_stru = parse_bool(key, value);
        } else if (key == "injection_mode") {
            g.injection_mode = parse_injection_mode(value);
        } else if (key == "retinex_grad_mode") {
            g.retinex_grad_mode = parse_retinex_grad_mode(value);
        } else if (key == "exposure_base") {
            g.exposure_base = parse_double(key, value);
        } else if (key == "exposure_amplitude") {
            g.exposure_amplitude = parse_double(key, value);
        } else if (key == "seed") {
            g.seed = static_cast<std::uint64_t>(parse_long(key, value));
        } else if (key == "beta_start") {
            cfg.beta_start = parse_double(key, value);
        } else if (key == "beta_end") {
            cfg.beta_end = parse_double(key, value);
        } else if (key == "predictor") {
            cfg.predictor = value;
        } else if (key == "gallery") {
            cfg.gallery = value;
        } else if (key == "reference") {
            cfg.reference = value;
        } else if (key == "restorer") {
            cfg.restorer = value;
        } else if (key == "unsharp_amount") {
            cfg.unsharp_amount = parse_double(key, value);
        } else if (key == "unsharp_sigma") {
            cfg.unsharp_sigma = parse_double(key, value);
        } else if (key == "threads") {
            cfg.threads = static_cast<int>(parse_long(key, value));
        } else {
            throw InvalidInputError("unknown config key '" + key + "'");
        }
    }
    return cfg;
}

std::map<std::string, std::string> read_key_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InvalidInputError("config line " + std::to_string(line_no) + " is not 'key = value': " + line);
        }
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

RunConfig load_config(const std::string& path, RunConfig base) {
    return parse_config(read_key_values(path), std::move(base));
}

std::string format_config(const RunConfig& cfg) {
    const GuidanceConfig& g = cfg.guidance;
    std::ostringstream out;
    char buf[64];
    const auto num = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    out << "T = " << g.T << "\n";
    out << "N = " << g.N << "\n";
    out << "s = " << num(g.s) << "\n";
    out << "lambda_exp = " << num(g.lambda_exp) << "\n";
    out << "lambda_ref = " << num(g.lambda_ref) << "\n";
    out << "lambda_stru = " << num(g.lambda_stru) << "\n";
    out << "enable_exp = " << (g.enable_exp ? "true" : "false") << "\n";
    out << "enable_ref = " << (g.enable_ref ? "true" : "false") << "\n";
    out << "enable_stru = " << (g.enable_stru ? "true" : "false") << "\n";
    out << "injection_mode = " << injection_mode_name(g.injection_mode) << "\n";
    out << "retinex_grad_mode = " << retinex_grad_mode_name(g.retinex_grad_mode) << "\n";
    out << "exposure_base = " << num(g.exposure_base) << "\n";
    out << "exposure_amplitude = " << num(g.exposure_amplitude) << "\n";
    out << "seed = " << g.seed << "\n";
    out << "beta_start = " << num(cfg.beta_start) << "\n";
    out << "beta_end = " << num(cfg.beta_end) << "\n";
    out << "predictor = " << cfg.predictor << "\n";
    out << "gallery = " << cfg.gallery << "\n";
    out << "reference = " << cfg.reference << "\n";
    out << "restorer = " << cfg.restorer << "\n";
    out << "unsharp_amount = " << num(cfg.unsharp_amount) << "\n";
    out << "unsharp_sigma = " << num(cfg.unsharp_sigma) << "\n";
    out << "threads = " << cfg.threads << "\n";
    return out.str();
}

void save_config(const RunConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write config file " + path);
    out << format_config(cfg);
}

}  // namespace pasguide
