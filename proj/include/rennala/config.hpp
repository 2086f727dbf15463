#pragma once

// Experiment configuration.
//
// Config files use a flat structured-text format: `key = value` entries,
// `[section]` headers for nested tables, `#` comments. Values are booleans,
// numbers, quoted strings, single-line arrays `[a, b]`, and single-line
// inline tables `{ k = v }`. The full grammar is documented in the README.

#include <cctype>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rennala/delay.hpp"
#include "rennala/engine.hpp"

namespace rennala {

class ConfigError : public std::runtime_error {
  public:
    ConfigError(int line, const std::string& what)
        : std::runtime_error("config line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const noexcept { return line_; }

  private:
    int line_;
};

// Parsed config value: bool, number, string, array, or table.
class ConfigValue {
  public:
    using Array = std::vector<ConfigValue>;
    using Table = std::map<std::string, ConfigValue>;

    ConfigValue() : v_(Table{}) {}
    explicit ConfigValue(bool b) : v_(b) {}
    explicit ConfigValue(double d) : v_(d) {}
    explicit ConfigValue(std::string s) : v_(std::move(s)) {}
    explicit ConfigValue(Array a) : v_(std::move(a)) {}
    explicit ConfigValue(Table t) : v_(std::move(t)) {}

    bool is_table() const { return std::holds_alternative<Table>(v_); }
    bool is_array() const { return std::holds_alternative<Array>(v_); }
    bool is_number() const { return std::holds_alternative<double>(v_); }
    bool is_string() const { return std::holds_alternative<std::string>(v_); }
    bool is_bool() const { return std::holds_alternative<bool>(v_); }

    bool as_bool(int line = 0) const {
        if (!is_bool()) throw ConfigError(line, "expected a boolean");
        return std::get<bool>(v_);
    }
    double as_number(int line = 0) const {
        if (!is_number()) throw ConfigError(line, "expected a number");
        return std::get<double>(v_);
    }
    std::int64_t as_int(int line = 0) const {
        const double d = as_number(line);
        const auto i = static_cast<std::int64_t>(d);
        if (static_cast<double>(i) != d) throw ConfigError(line, "expected an integer");
        return i;
    }
    const std::string& as_string(int line = 0) const {
        if (!is_string()) throw ConfigError(line, "expected a string");
        return std::get<std::string>(v_);
    }
    const Array& as_array(int line = 0) const {
        if (!is_array()) throw ConfigError(line, "expected an array");
        return std::get<Array>(v_);
    }
    const Table& as_table(int line = 0) const {
        if (!is_table()) throw ConfigError(line, "expected a table");
        return std::get<Table>(v_);
    }
    Table& table() { return std::get<Table>(v_); }

    const ConfigValue* find(const std::string& key) const {
        const auto& t = std::get<Table>(v_);
        auto it = t.find(key);
        return it == t.end() ? nullptr : &it->second;
    }

  private:
    std::variant<bool, double, std::string, Array, Table> v_;
};

namespace config_detail {

struct Cursor {
    const std::string& s;
    std::size_t pos = 0;
    int line;

    void skip_ws() {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= s.size() || s[pos] == '#';
    }
    char peek() {
        skip_ws();
        if (pos >= s.size()) throw ConfigError(line, "unexpected end of line");
        return s[pos];
    }
    char take() {
        const char c = peek();
        ++pos;
        return c;
    }
    void expect(char c) {
        if (take() != c) throw ConfigError(line, std::string("expected '") + c + "'");
    }
};

inline std::string parse_key(Cursor& c) {
    c.skip_ws();
    std::string key;
    while (c.pos < c.s.size() &&
           (std::isalnum(static_cast<unsigned char>(c.s[c.pos])) || c.s[c.pos] == '_' ||
            c.s[c.pos] == '.' || c.s[c.pos] == '^')) {
        key.push_back(c.s[c.pos++]);
    }
    if (key.empty()) throw ConfigError(c.line, "expected a key");
    return key;
}

inline ConfigValue parse_value(Cursor& c);

inline ConfigValue parse_scalar(Cursor& c) {
    const char first = c.peek();
    if (first == '"') {
        c.take();
        std::string out;
        while (c.pos < c.s.size() && c.s[c.pos] != '"') out.push_back(c.s[c.pos++]);
        if (c.pos >= c.s.size()) throw ConfigError(c.line, "unterminated string");
        ++c.pos;
        return ConfigValue(out);
    }
    // bare word: bool, or number
    std::string tok;
    while (c.pos < c.s.size() && c.s[c.pos] != ',' && c.s[c.pos] != ']' && c.s[c.pos] != '}' &&
           c.s[c.pos] != ' ' && c.s[c.pos] != '\t' && c.s[c.pos] != '#') {
        tok.push_back(c.s[c.pos++]);
    }
    if (tok == "true") return ConfigValue(true);
    if (tok == "false") return ConfigValue(false);
    try {
        std::size_t used = 0;
        const double d = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return ConfigValue(d);
    } catch (const std::exception&) {
        throw ConfigError(c.line, "cannot parse value '" + tok + "'");
    }
}

inline ConfigValue parse_value(Cursor& c) {
    const char first = c.peek();
    if (first == '[') {
        c.take();
        ConfigValue::Array arr;
        if (c.peek() == ']') {
            c.take();
            return ConfigValue(arr);
        }
        while (true) {
            arr.push_back(parse_value(c));
            const char n = c.take();
            if (n == ']') break;
            if (n != ',') throw ConfigError(c.line, "expected ',' or ']' in array");
        }
        return ConfigValue(arr);
    }
    if (first == '{') {
        c.take();
        ConfigValue::Table tab;
        if (c.peek() == '}') {
            c.take();
            return ConfigValue(tab);
        }
        while (true) {
            const std::string key = parse_key(c);
            c.expect('=');
            tab[key] = parse_value(c);
            const char n = c.take();
            if (n == '}') break;
            if (n != ',') throw ConfigError(c.line, "expected ',' or '}' in table");
        }
        return ConfigValue(tab);
    }
    return parse_scalar(c);
}

}  // namespace config_detail

// Parses config text into a nested table. Throws ConfigError with the
// offending line number.
inline ConfigValue parse_config(const std::string& text) {
    ConfigValue root;
    ConfigValue* current = &root;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        config_detail::Cursor c{raw, 0, lineno};
        if (c.done()) continue;
        if (c.peek() == '[') {
            c.take();
            const std::string path = config_detail::parse_key(c);
            c.expect(']');
            if (!c.done()) throw ConfigError(lineno, "trailing characters after section header");
            current = &root;
            std::size_t start = 0;
            while (start <= path.size()) {
                const std::size_t dot = path.find('.', start);
                const std::string part = path.substr(start, dot == std::string::npos
                                                                ? std::string::npos
                                                                : dot - start);
                if (part.empty()) throw ConfigError(lineno, "empty section name");
                auto& slot = current->table()[part];
                if (!slot.is_table()) throw ConfigError(lineno, "section clashes with a value");
                current = &slot;
                if (dot == std::string::npos) break;
                start = dot + 1;
            }
            continue;
        }
        const std::string key = config_detail::parse_key(c);
        c.expect('=');
        ConfigValue v = config_detail::parse_value(c);
        if (!c.done()) throw ConfigError(lineno, "trailing characters after value");
        current->table()[key] = std::move(v);
    }
    return root;
}

// ----- experiment config ---------------------------------------------------

struct ProblemSpec {
    std::string kind = "quadratic";
    int dim = 100;
    double sigma_add = 0.1;
    // "total": sigma = sqrt(d) * sigma_add (the oracle's actual standard
    // deviation); "per_coordinate": sigma = sigma_add.
    std::string sigma_convention = "total";
};

// Initialization batch choice in a grid: a literal value, B, or B^2.
struct B0Choice {
    enum class Kind { Literal, EqualB, BSquared } kind = Kind::EqualB;
    std::int64_t literal = 1;

    std::int64_t resolve(std::int64_t B) const {
        switch (kind) {
            case Kind::Literal: return literal;
            case Kind::EqualB: return B;
            case Kind::BSquared: return B * B;
        }
        return B;
    }
};

struct MethodGrid {
    Method method = Method::RennalaSgd;
    std::vector<double> gamma;
    std::vector<std::int64_t> B;
    std::vector<double> p{1.0};
    std::vector<B0Choice> B0{B0Choice{}};
    std::vector<double> alpha{1.0};
};

struct ExperimentConfig {
    ProblemSpec problem;
    DelaySpec delay;
    int workers = 10;
    double budget = 1e5;
    std::int64_t record_stride = 1;
    std::vector<std::uint64_t> seeds{1};
    std::string out_dir = "out";
    std::string metric = "grad_sq_norm";  // or "f_value"
    std::int64_t max_configs = 10000;
    std::vector<MethodGrid> methods;
};

namespace config_detail {

inline DelaySpec delay_from_table(const ConfigValue& t) {
    DelaySpec spec;
    if (const auto* v = t.find("kind")) spec.kind = delay_kind_from_string(v->as_string());
    if (const auto* v = t.find("permute")) spec.permute = v->as_bool();
    if (const auto* v = t.find("peaks")) spec.peaks = static_cast<int>(v->as_int());
    if (const auto* v = t.find("stddev")) spec.stddev = v->as_number();
    if (const auto* v = t.find("lo")) spec.lo = v->as_number();
    if (const auto* v = t.find("hi")) spec.hi = v->as_number();
    return spec;
}

inline B0Choice b0_choice_from(const ConfigValue& v) {
    B0Choice c;
    if (v.is_number()) {
        c.kind = B0Choice::Kind::Literal;
        c.literal = v.as_int();
        if (c.literal < 1) throw std::invalid_argument("B0 must be >= 1");
        return c;
    }
    const std::string& s = v.as_string();
    if (s == "B") {
        c.kind = B0Choice::Kind::EqualB;
    } else if (s == "B^2") {
        c.kind = B0Choice::Kind::BSquared;
    } else {
        throw std::invalid_argument("B0 entries must be numbers, \"B\", or \"B^2\"");
    }
    return c;
}

}  // namespace config_detail

inline ExperimentConfig experiment_config_from(const ConfigValue& root) {
    ExperimentConfig cfg;
    if (const auto* t = root.find("problem")) {
        if (const auto* v = t->find("kind")) cfg.problem.kind = v->as_string();
        if (const auto* v = t->find("dim")) cfg.problem.dim = static_cast<int>(v->as_int());
        if (const auto* v = t->find("sigma_add")) cfg.problem.sigma_add = v->as_number();
        if (const auto* v = t->find("sigma_convention")) {
            cfg.problem.sigma_convention = v->as_string();
            if (cfg.problem.sigma_convention != "total" &&
                cfg.problem.sigma_convention != "per_coordinate") {
                throw std::invalid_argument("sigma_convention must be total or per_coordinate");
            }
        }
    }
    if (const auto* t = root.find("delay")) cfg.delay = config_detail::delay_from_table(*t);
    if (const auto* v = root.find("workers")) cfg.workers = static_cast<int>(v->as_int());
    if (const auto* v = root.find("budget")) cfg.budget = v->as_number();
    if (const auto* v = root.find("record_stride")) cfg.record_stride = v->as_int();
    if (const auto* v = root.find("out_dir")) cfg.out_dir = v->as_string();
    if (const auto* v = root.find("metric")) cfg.metric = v->as_string();
    if (const auto* v = root.find("max_configs")) cfg.max_configs = v->as_int();
    if (const auto* v = root.find("seeds")) {
        cfg.seeds.clear();
        for (const auto& s : v->as_array()) {
            cfg.seeds.push_back(static_cast<std::uint64_t>(s.as_int()));
        }
    }
    if (const auto* m = root.find("method")) {
        for (const auto& [name, body] : m->as_table()) {
            MethodGrid grid;
            grid.method = method_from_string(name);
            if (const auto* v = body.find("gamma")) {
                grid.gamma.clear();
                for (const auto& g : v->as_array()) grid.gamma.push_back(g.as_number());
            }
            if (const auto* v = body.find("B")) {
                grid.B.clear();
                for (const auto& b : v->as_array()) grid.B.push_back(b.as_int());
            }
            if (const auto* v = body.find("p")) {
                grid.p.clear();
                for (const auto& pv : v->as_array()) grid.p.push_back(pv.as_number());
            }
            if (const auto* v = body.find("alpha")) {
                grid.alpha.clear();
                for (const auto& a : v->as_array()) grid.alpha.push_back(a.as_number());
            }
            if (const auto* v = body.find("B0")) {
                grid.B0.clear();
                for (const auto& b : v->as_array()) {
                    grid.B0.push_back(config_detail::b0_choice_from(b));
                }
            }
            cfg.methods.push_back(std::move(grid));
        }
    }

    // Invariants.
    if (cfg.workers < 1) throw std::invalid_argument("config: workers must be >= 1");
    if (!(cfg.budget > 0.0)) throw std::invalid_argument("config: budget must be > 0");
    if (cfg.record_stride < 1) throw std::invalid_argument("config: record_stride must be >= 1");
    if (cfg.metric != "grad_sq_norm" && cfg.metric != "f_value") {
        throw std::invalid_argument("config: metric must be grad_sq_norm or f_value");
    }
    if (cfg.seeds.empty()) throw std::invalid_argument("config: seeds must be nonempty");
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
        for (std::size_t j = i + 1; j < cfg.seeds.size(); ++j) {
            if (cfg.seeds[i] == cfg.seeds[j]) {
                throw std::invalid_argument("config: seeds must be distinct");
            }
        }
    }
    for (const auto& g : cfg.methods) {
        if (g.gamma.empty() || g.B.empty() || g.p.empty() || g.B0.empty() || g.alpha.empty()) {
            throw std::invalid_argument("config: method grids must be nonempty");
        }
        for (double gv : g.gamma) {
            if (!(gv >= 0.0)) throw std::invalid_argument("config: gamma must be >= 0");
        }
        for (auto b : g.B) {
            if (b < 1) throw std::invalid_argument("config: B must be >= 1");
        }
        for (double pv : g.p) {
            if (!(pv > 0.0 && pv <= 1.0)) throw std::invalid_argument("config: p must be in (0, 1]");
        }
        for (double av : g.alpha) {
            if (!(av > 0.0 && av <= 1.0)) {
                throw std::invalid_argument("config: alpha must be in (0, 1]");
            }
        }
    }
    return cfg;
}

inline ExperimentConfig parse_experiment_config(const std::string& text) {
    return experiment_config_from(parse_config(text));
}

}  // namespace rennala
