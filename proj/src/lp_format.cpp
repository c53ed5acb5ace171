#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "prpmi/solver.hpp"

namespace prpmi {

namespace {

constexpr int kTermsPerLine = 6;
constexpr const char* kConstTag = "\\ constant variable: ";

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string signed_term(double coef, const std::string& name, bool first) {
  std::string out;
  if (coef < 0)
    out = first ? "- " : " - ";
  else
    out = first ? "" : " + ";
  out += num(std::abs(coef)) + " " + name;
  return out;
}

std::string constant_name(const MilpModel& model) {
  std::string name = "obj_const";
  while (model.find_variable(name)) name += "_";
  return name;
}

}  // namespace

std::string to_lp_string(const MilpModel& model) {
  std::ostringstream os;
  const std::string cname = constant_name(model);
  os << "\\ Problem written by prpmi " << PRPMI_VERSION << "\n";
  os << "\\ The objective constant is the coefficient of a variable fixed to 1.\n";
  os << kConstTag << cname << "\n";
  os << "Minimize\n obj: ";
  // Every variable is listed so a reader sees them in index order.
  int on_line = 0;
  for (VarId j = 0; j < model.variable_count(); ++j) {
    os << signed_term(model.objective()[j], model.variable(j).name, j == 0);
    if (++on_line == kTermsPerLine) {
      os << "\n  ";
      on_line = 0;
    }
  }
  os << signed_term(model.objective_offset(), cname, model.variable_count() == 0) << "\n";
  os << "Subject To\n";
  for (const Constraint& row : model.constraints()) {
    os << " " << row.name << ": ";
    on_line = 0;
    for (std::size_t k = 0; k < row.terms.size(); ++k) {
      os << signed_term(row.terms[k].coef, model.variable(row.terms[k].var).name, k == 0);
      if (++on_line == kTermsPerLine && k + 1 < row.terms.size()) {
        os << "\n  ";
        on_line = 0;
      }
    }
    const char* sense = row.sense == Sense::LessEqual ? " <= " : row.sense == Sense::Equal ? " = " : " >= ";
    os << sense << num(row.rhs) << "\n";
  }
  os << "Bounds\n";
  for (const Variable& v : model.variables()) {
    if (v.type == VarType::Binary && v.lower == 0.0 && v.upper == 1.0) continue;
    if (v.lower == v.upper) {
      os << " " << v.name << " = " << num(v.lower) << "\n";
      continue;
    }
    if (!std::isfinite(v.lower) && !std::isfinite(v.upper)) {
      os << " " << v.name << " free\n";
      continue;
    }
    os << " " << (std::isfinite(v.lower) ? num(v.lower) : std::string("-inf")) << " <= " << v.name;
    if (std::isfinite(v.upper)) os << " <= " << num(v.upper);
    os << "\n";
  }
  os << " " << cname << " = 1\n";
  bool any_binary = false;
  for (const Variable& v : model.variables()) any_binary = any_binary || v.type == VarType::Binary;
  if (any_binary) {
    os << "Binaries\n";
    for (const Variable& v : model.variables())
      if (v.type == VarType::Binary) os << " " << v.name << "\n";
  }
  os << "End\n";
  return os.str();
}

void export_lp(const MilpModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_lp_string(model);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

namespace {

enum class Section { None, Objective, Constraints, Bounds, Binaries, Generals, End };

struct Token {
  enum Kind { Name, Number, Sign, Sense, Colon } kind;
  std::string text;
  double value = 0.0;
  int line = 0;
};

[[noreturn]] void fail(int line, const std::string& what) {
  throw std::runtime_error("LP line " + std::to_string(line) + ": " + what);
}

bool name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || std::string_view("_.!\"#$%&()/,;?@'`{}|~[]^").find(c) !=
                                                             std::string_view::npos;
}

std::optional<double> as_infinity(std::string lower) {
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "inf" || lower == "infinity") return kInfinity;
  return std::nullopt;
}

void tokenize(const std::string& text, int line, std::vector<Token>& out) {
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '+' || c == '-') {
      out.push_back({Token::Sign, std::string(1, c), 0.0, line});
      ++i;
    } else if (c == ':') {
      out.push_back({Token::Colon, ":", 0.0, line});
      ++i;
    } else if (c == '<' || c == '>' || c == '=') {
      std::size_t j = i + 1;
      while (j < text.size() && (text[j] == '<' || text[j] == '>' || text[j] == '=')) ++j;
      const std::string op = text.substr(i, j - i);
      std::string sense;
      if (op == "<=" || op == "=<" || op == "<")
        sense = "<=";
      else if (op == ">=" || op == "=>" || op == ">")
        sense = ">=";
      else if (op == "=")
        sense = "=";
      else
        fail(line, "bad operator " + op);
      out.push_back({Token::Sense, sense, 0.0, line});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      const double v = std::stod(text.substr(i), &used);
      out.push_back({Token::Number, text.substr(i, used), v, line});
      i += used;
    } else if (name_char(c)) {
      std::size_t j = i;
      while (j < text.size() && name_char(text[j])) ++j;
      const std::string word = text.substr(i, j - i);
      if (auto inf = as_infinity(word))
        out.push_back({Token::Number, word, *inf, line});
      else
        out.push_back({Token::Name, word, 0.0, line});
      i = j;
    } else {
      fail(line, std::string("unexpected character '") + c + "'");
    }
  }
}

struct RawRow {
  std::string name;
  std::vector<std::pair<std::string, double>> terms;
  std::string sense;
  double rhs = 0.0;
};

class LpReader {
 public:
  MilpModel read(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    int number = 0;
    Section section = Section::None;
    std::vector<Token> obj_tokens, row_tokens;
    while (std::getline(is, line)) {
      ++number;
      if (line.rfind(kConstTag, 0) == 0) constant_name_ = trim(line.substr(std::string(kConstTag).size()));
      if (auto cut = line.find('\\'); cut != std::string::npos) line.resize(cut);
      const std::string head = lower(trim(line));
      if (head.empty()) continue;
      if (head == "minimize" || head == "minimum" || head == "min") {
        section = Section::Objective;
        continue;
      }
      if (head == "maximize" || head == "maximum" || head == "max") {
        section = Section::Objective;
        maximize_ = true;
        continue;
      }
      if (head == "subject to" || head == "such that" || head == "st" || head == "s.t.") {
        section = Section::Constraints;
        continue;
      }
      if (head == "bounds" || head == "bound") {
        section = Section::Bounds;
        continue;
      }
      if (head == "binaries" || head == "binary" || head == "bin") {
        section = Section::Binaries;
        continue;
      }
      if (head == "generals" || head == "general" || head == "gen")
        fail(number, "general integer variables are not supported");
      if (head == "end") {
        section = Section::End;
        continue;
      }
      switch (section) {
        case Section::Objective:
          tokenize(line, number, obj_tokens);
          break;
        case Section::Constraints:
          tokenize(line, number, row_tokens);
          break;
        case Section::Bounds:
          parse_bound(line, number);
          break;
        case Section::Binaries: {
          std::istringstream ws(line);
          std::string w;
          while (ws >> w) {
            declare(w);
            binary_.insert(w);
          }
          break;
        }
        case Section::None:
        case Section::Generals:
        case Section::End:
          fail(number, "text outside a section");
      }
    }
    parse_objective(obj_tokens);
    parse_rows(row_tokens);
    return build();
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }
  static std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  }

  void declare(const std::string& name) {
    if (index_.emplace(name, static_cast<int>(order_.size())).second) {
      order_.push_back(name);
      lo_.push_back(0.0);
      hi_.push_back(kInfinity);
    }
  }

  // Reads "[sign] [coef] name" terms until a sense token or the end.
  std::size_t parse_terms(const std::vector<Token>& t, std::size_t i, std::vector<std::pair<std::string, double>>& terms,
                          double& constant) {
    while (i < t.size() && t[i].kind != Token::Sense) {
      double sign = 1.0;
      bool had_sign = false;
      while (i < t.size() && t[i].kind == Token::Sign) {
        if (t[i].text == "-") sign = -sign;
        had_sign = true;
        ++i;
      }
      if (i >= t.size()) fail(t.back().line, "dangling sign");
      double coef = 1.0;
      bool had_coef = false;
      if (t[i].kind == Token::Number) {
        coef = t[i].value;
        had_coef = true;
        ++i;
      }
      if (i < t.size() && t[i].kind == Token::Name && !(i + 1 < t.size() && t[i + 1].kind == Token::Colon)) {
        declare(t[i].text);
        terms.emplace_back(t[i].text, sign * coef);
        ++i;
      } else if (had_coef) {
        constant += sign * coef;
      } else {
        if (had_sign || i < t.size()) fail(t[std::min(i, t.size() - 1)].line, "expected a term");
        break;
      }
    }
    return i;
  }

  void parse_objective(const std::vector<Token>& t) {
    std::size_t i = 0;
    if (t.size() >= 2 && t[0].kind == Token::Name && t[1].kind == Token::Colon) i = 2;
    double constant = 0.0;
    i = parse_terms(t, i, objective_, constant);
    if (i != t.size()) fail(t[i].line, "unexpected token in objective");
    offset_ = constant;
  }

  void parse_rows(const std::vector<Token>& t) {
    std::size_t i = 0;
    while (i < t.size()) {
      RawRow row;
      if (i + 1 < t.size() && t[i].kind == Token::Name && t[i + 1].kind == Token::Colon) {
        row.name = t[i].text;
        i += 2;
      } else {
        row.name = "R" + std::to_string(rows_.size() + 1);
      }
      double constant = 0.0;
      i = parse_terms(t, i, row.terms, constant);
      if (i >= t.size() || t[i].kind != Token::Sense) fail(t.back().line, "row " + row.name + " has no sense");
      row.sense = t[i++].text;
      double sign = 1.0;
      while (i < t.size() && t[i].kind == Token::Sign) {
        if (t[i].text == "-") sign = -sign;
        ++i;
      }
      if (i >= t.size() || t[i].kind != Token::Number) fail(t.back().line, "row " + row.name + " has no right-hand side");
      row.rhs = sign * t[i++].value - constant;
      rows_.push_back(std::move(row));
    }
  }

  void parse_bound(const std::string& line, int number) {
    std::vector<Token> t;
    tokenize(line, number, t);
    auto value_at = [&](std::size_t& i) {
      double sign = 1.0;
      while (i < t.size() && t[i].kind == Token::Sign) {
        if (t[i].text == "-") sign = -sign;
        ++i;
      }
      if (i >= t.size() || t[i].kind != Token::Number) fail(number, "expected a bound value");
      return sign * t[i++].value;
    };
    if (t.size() == 2 && t[0].kind == Token::Name && lower(t[1].text) == "free") {
      declare(t[0].text);
      lo_[index_[t[0].text]] = -kInfinity;
      hi_[index_[t[0].text]] = kInfinity;
      return;
    }
    std::size_t i = 0;
    if (t[0].kind == Token::Name) {
      // name sense value
      declare(t[0].text);
      const int v = index_[t[0].text];
      i = 1;
      if (i >= t.size() || t[i].kind != Token::Sense) fail(number, "bad bound");
      const std::string s = t[i++].text;
      const double b = value_at(i);
      if (s == "<=")
        hi_[v] = b;
      else if (s == ">=")
        lo_[v] = b;
      else
        lo_[v] = hi_[v] = b;
    } else {
      // value <= name [<= value]
      const double a = value_at(i);
      if (i + 1 >= t.size() || t[i].kind != Token::Sense || t[i + 1].kind != Token::Name) fail(number, "bad bound");
      const std::string s = t[i].text;
      const std::string name = t[i + 1].text;
      declare(name);
      const int v = index_[name];
      i += 2;
      if (s == "<=")
        lo_[v] = a;
      else if (s == ">=")
        hi_[v] = a;
      else
        lo_[v] = hi_[v] = a;
      if (i < t.size()) {
        if (t[i].kind != Token::Sense) fail(number, "bad bound");
        const std::string s2 = t[i++].text;
        const double b = value_at(i);
        if (s2 == "<=")
          hi_[v] = b;
        else
          lo_[v] = b;
      }
    }
    if (i != t.size()) fail(number, "trailing text in bound");
  }

  MilpModel build() {
    MilpModel model;
    std::vector<VarId> id(order_.size(), -1);
    const int const_var = constant_name_.empty() || !index_.count(constant_name_) ? -1 : index_[constant_name_];
    for (std::size_t k = 0; k < order_.size(); ++k) {
      if (static_cast<int>(k) == const_var) continue;
      if (binary_.count(order_[k])) {
        id[k] = model.add_variable(order_[k], VarType::Binary, lo_[k] == 0.0 ? 0.0 : lo_[k],
                                   std::isfinite(hi_[k]) ? std::min(hi_[k], 1.0) : 1.0);
      } else {
        id[k] = model.add_variable(order_[k], VarType::Continuous, lo_[k], hi_[k]);
      }
    }
    const double dir = maximize_ ? -1.0 : 1.0;
    LinExpr obj(dir * offset_);
    for (const auto& [name, coef] : objective_) {
      const int k = index_[name];
      if (k == const_var)
        obj += LinExpr(dir * coef * lo_[k]);
      else
        obj.add(id[k], dir * coef);
    }
    model.add_objective(obj);
    for (const RawRow& row : rows_) {
      LinExpr lhs;
      for (const auto& [name, coef] : row.terms) {
        const int k = index_[name];
        if (k == const_var)
          lhs += LinExpr(coef * lo_[k]);
        else
          lhs.add(id[k], coef);
      }
      const Sense s = row.sense == "<=" ? Sense::LessEqual : row.sense == ">=" ? Sense::GreaterEqual : Sense::Equal;
      model.add_constraint(row.name, lhs, s, LinExpr(row.rhs));
    }
    return model;
  }

  bool maximize_ = false;
  std::string constant_name_;
  std::unordered_map<std::string, int> index_;
  std::vector<std::string> order_;
  std::vector<double> lo_, hi_;
  std::unordered_set<std::string> binary_;
  std::vector<std::pair<std::string, double>> objective_;
  double offset_ = 0.0;
  std::vector<RawRow> rows_;
};

}  // namespace

MilpModel parse_lp(const std::string& text) { return LpReader().read(text); }

MilpModel read_lp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_lp(ss.str());
}

}  // namespace prpmi
