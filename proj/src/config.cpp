#include "polydyn/config.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace polydyn {

namespace {

const std::set<std::string> kRunKeys{"seed", "N", "nu", "L", "k", "abox", "advance", "out", "format"};
const std::set<std::string> kBudgetKeys{"term_cap", "step_cap", "enum_cap", "work_cap"};

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::string where(std::size_t line) {
  return line ? "line " + std::to_string(line) : std::string("command line");
}

bool system_key_ok(const std::string& key) {
  if (key == "p" || key == "m" || key == "a" || key == "b") return true;
  if (key.size() < 2 || (key[0] != 'g' && key[0] != 'h')) return false;
  return std::all_of(key.begin() + 1, key.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

// Nonnegative integer; accepts scientific shorthand such as 1e6.
std::uint64_t parse_u64(const std::string& text, std::size_t line, const std::string& key) {
  auto fail = [&] {
    return Error(Errc::ParseError, "'" + key + "' expects a nonnegative integer, got '" + text + "'",
                 where(line));
  };
  std::string s = trim(text);
  std::size_t e = s.find_first_of("eE");
  std::string mant = s.substr(0, e);
  if (mant.empty() || !std::all_of(mant.begin(), mant.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c));
      }))
    throw fail();
  std::uint64_t v = 0;
  for (char c : mant) {
    if (v > (UINT64_MAX - 9) / 10) throw fail();
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  if (e != std::string::npos) {
    std::string ex = s.substr(e + 1);
    if (ex.empty() || ex.size() > 2 || !std::all_of(ex.begin(), ex.end(), [](char c) {
          return std::isdigit(static_cast<unsigned char>(c));
        }))
      throw fail();
    for (int i = std::stoi(ex); i > 0; --i) {
      if (v > UINT64_MAX / 10) throw fail();
      v *= 10;
    }
  }
  return v;
}

std::int64_t parse_i64(const std::string& text, std::size_t line, const std::string& key) {
  std::string s = trim(text);
  bool neg = !s.empty() && s[0] == '-';
  std::uint64_t mag = parse_u64(neg ? s.substr(1) : s, line, key);
  if (mag > static_cast<std::uint64_t>(INT64_MAX)) {
    throw Error(Errc::ParseError, "'" + key + "' out of range", where(line));
  }
  return neg ? -static_cast<std::int64_t>(mag) : static_cast<std::int64_t>(mag);
}

std::vector<std::uint64_t> parse_list(const std::string& text, std::size_t line,
                                      const std::string& key) {
  std::vector<std::uint64_t> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = text.find(',', start);
    out.push_back(parse_u64(text.substr(start, comma - start), line, key));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::uint64_t positive(std::uint64_t v, std::size_t line, const std::string& key) {
  if (v == 0) throw Error(Errc::ParseError, "'" + key + "' must be positive", where(line));
  return v;
}

}  // namespace

void RawConfig::set(const std::string& section, const std::string& key, std::string value,
                    std::size_t line) {
  sections_[section][key] = Entry{std::move(value), line};
}

const RawConfig::Entry* RawConfig::find(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

const std::map<std::string, RawConfig::Entry>& RawConfig::section(const std::string& name) const {
  static const std::map<std::string, Entry> empty;
  auto s = sections_.find(name);
  return s == sections_.end() ? empty : s->second;
}

RawConfig parse_config_text(std::string_view text) {
  RawConfig raw;
  std::string section = "system";
  std::size_t lineno = 0, pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++lineno;
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw Error(Errc::ParseError, "unterminated section header", where(lineno));
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section != "system" && section != "run" && section != "budgets") {
        throw Error(Errc::ParseError, "unknown section [" + section + "]", where(lineno));
      }
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw Error(Errc::ParseError, "expected key=value", where(lineno));
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key == "w0") key = "seed";
    bool known = section == "system"    ? system_key_ok(key)
                 : section == "run"     ? kRunKeys.count(key) > 0
                                        : kBudgetKeys.count(key) > 0;
    if (!known) {
      throw Error(Errc::ParseError, "unknown key '" + key + "' in [" + section + "]", where(lineno));
    }
    if (raw.find(section, key)) {
      throw Error(Errc::ParseError, "repeated key '" + key + "'", where(lineno));
    }
    raw.set(section, key, value, lineno);
  }
  return raw;
}

ExperimentConfig resolve_config(const RawConfig& raw) {
  auto require = [&](const std::string& key) -> const RawConfig::Entry& {
    const RawConfig::Entry* e = raw.find("system", key);
    if (!e) throw Error(Errc::MissingField, "missing field '" + key + "'", "[system]");
    return *e;
  };

  const auto& pe = require("p");
  std::uint64_t p = parse_u64(pe.value, pe.line, "p");
  std::optional<Field> field;
  try {
    field.emplace(p);
  } catch (const Error& e) {
    throw Error(e.code(), e.what(), where(pe.line));
  }

  const auto& me = require("m");
  std::size_t m = parse_u64(me.value, me.line, "m");
  if (m < 1 || m > 64) throw Error(Errc::ParseError, "m must lie in [1, 64]", where(me.line));

  std::uint64_t a = 1, b = 1;
  if (auto* e = raw.find("system", "a")) a = field->reduce_signed(parse_i64(e->value, e->line, "a"));
  if (auto* e = raw.find("system", "b")) b = field->reduce_signed(parse_i64(e->value, e->line, "b"));

  Ring ring(*field, m + 1);
  std::vector<Polynomial> g, h;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& ge = require("g" + std::to_string(i));
    const auto* he = raw.find("system", "h" + std::to_string(i));
    try {
      g.push_back(Polynomial::parse(ring, ge.value));
    } catch (const Error& e) {
      throw Error(e.code(), "g" + std::to_string(i) + ": " + e.what(), where(ge.line));
    }
    try {
      h.push_back(he ? Polynomial::parse(ring, he->value) : Polynomial::constant(ring, 0));
    } catch (const Error& e) {
      throw Error(e.code(), "h" + std::to_string(i) + ": " + e.what(), where(he->line));
    }
  }
  for (const auto& [key, entry] : raw.section("system")) {
    if ((key[0] == 'g' || key[0] == 'h') && key.size() > 1 && std::stoul(key.substr(1)) >= m) {
      throw Error(Errc::ParseError, "'" + key + "' has index >= m", where(entry.line));
    }
  }

  std::optional<TriangularSystem> sys;
  try {
    sys.emplace(TriangularSystem::build(*field, m, std::move(g), std::move(h), a, b));
  } catch (const Error& e) {
    throw Error(e.code(), e.what(), "[system]");
  }

  RunOptions run;
  run.seed.w.assign(m + 1, 0);
  run.L = std::min<std::uint64_t>(p - 1, 64);
  if (auto* e = raw.find("run", "seed"); e && trim(e->value) != "zero") {
    auto w = parse_list(e->value, e->line, "seed");
    if (w.size() != m + 1) {
      throw Error(Errc::MissingField,
                  "seed needs " + std::to_string(m + 1) + " components, got " + std::to_string(w.size()),
                  where(e->line));
    }
    for (auto& x : w) x = field->reduce(x);
    run.seed.w = std::move(w);
  }
  if (auto* e = raw.find("run", "N")) run.n_points = positive(parse_u64(e->value, e->line, "N"), e->line, "N");
  if (auto* e = raw.find("run", "nu")) {
    run.nus = parse_list(e->value, e->line, "nu");
    for (auto nu : run.nus) positive(nu, e->line, "nu");
  }
  if (auto* e = raw.find("run", "L")) run.L = positive(parse_u64(e->value, e->line, "L"), e->line, "L");
  if (auto* e = raw.find("run", "k")) run.k = parse_u64(e->value, e->line, "k");
  if (auto* e = raw.find("run", "abox")) run.abox = positive(parse_u64(e->value, e->line, "abox"), e->line, "abox");
  if (auto* e = raw.find("run", "advance")) {
    std::string v = trim(e->value);
    if (v == "auto" || v == "yes" || v == "true") run.advance = true;
    else if (v == "none" || v == "no" || v == "false") run.advance = false;
    else throw Error(Errc::ParseError, "advance expects auto or none", where(e->line));
  }
  if (auto* e = raw.find("run", "out")) run.out = trim(e->value);
  if (auto* e = raw.find("run", "format")) {
    run.format = trim(e->value);
    if (run.format != "csv" && run.format != "binary") {
      throw Error(Errc::ParseError, "format expects csv or binary", where(e->line));
    }
  }

  Budgets budgets;
  auto budget = [&](const char* key, auto& slot) {
    if (auto* e = raw.find("budgets", key)) slot = positive(parse_u64(e->value, e->line, key), e->line, key);
  };
  budget("term_cap", budgets.term_cap);
  budget("step_cap", budgets.step_cap);
  budget("enum_cap", budgets.enum_cap);
  budget("work_cap", budgets.work_cap);

  return ExperimentConfig{std::move(*sys), std::move(run), budgets};
}

ExperimentConfig parse_config(std::string_view text) { return resolve_config(parse_config_text(text)); }

}  // namespace polydyn
