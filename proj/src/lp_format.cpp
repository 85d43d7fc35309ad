#include "rmsn/lp_format.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>

namespace rmsn::milp {

LpParseError::LpParseError(std::size_t line, const std::string& what)
    : InvalidInput("LP line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

constexpr std::size_t kTermsPerLine = 6;

std::string number(double value) {
  if (value == 0.0) value = 0.0;  // no "-0"
  if (std::isinf(value)) return value > 0 ? "+inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

void write_expression(std::string& out, const MilpModel& model, std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(),
            [&](const Term& a, const Term& b) { return model.variables[a.var].name < model.variables[b.var].name; });
  if (terms.empty()) {
    if (!model.variables.empty()) out += " 0 " + model.variables.front().name;
    return;
  }
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i > 0 && i % kTermsPerLine == 0) out += "\n  ";
    const double coef = terms[i].coef;
    if (i == 0) out += coef < 0 ? " -" : " ";
    else out += coef < 0 ? " - " : " + ";
    out += number(std::abs(coef));
    out += ' ';
    out += model.variables[terms[i].var].name;
  }
}

const char* sense_text(Sense s) {
  switch (s) {
    case Sense::le: return "<=";
    case Sense::ge: return ">=";
    case Sense::eq: return "=";
  }
  return "=";
}

}  // namespace

std::string emit_lp(const MilpModel& model) {
  std::string out = "Minimize\n obj:";
  write_expression(out, model, model.objective);
  out += "\nSubject To\n";
  for (const auto& c : model.constraints) {
    out += ' ';
    out += c.name;
    out += ':';
    write_expression(out, model, c.terms);
    out += ' ';
    out += sense_text(c.sense);
    out += ' ';
    out += number(c.rhs);
    out += '\n';
  }

  std::vector<std::size_t> order(model.variables.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return model.variables[a].name < model.variables[b].name; });

  out += "Bounds\n";
  for (std::size_t i : order) {
    const auto& v = model.variables[i];
    if (v.kind == VarKind::binary) continue;
    out += ' ';
    if (std::isinf(v.lower) && std::isinf(v.upper)) {
      out += v.name + " free";
    } else if (std::isinf(v.upper)) {
      out += v.name + " >= " + number(v.lower);
    } else {
      out += number(v.lower) + " <= " + v.name + " <= " + number(v.upper);
    }
    out += '\n';
  }
  out += "Binaries\n";
  for (std::size_t i : order)
    if (model.variables[i].kind == VarKind::binary) out += ' ' + model.variables[i].name + '\n';
  out += "End\n";
  return out;
}

// ---------------------------------------------------------------------------

namespace {

enum class Section { none, objective, constraints, bounds, binaries, generals, end };

struct Token {
  enum Kind { name, number, sign, sense, colon } kind;
  std::string text;
  double value = 0.0;
  std::size_t line = 0;
};

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

std::optional<Section> section_header(std::string_view line) {
  std::string key = lower(line);
  key.erase(std::remove_if(key.begin(), key.end(), [](unsigned char ch) { return std::isspace(ch); }), key.end());
  if (key == "minimize" || key == "minimise" || key == "minimum" || key == "min") return Section::objective;
  if (key == "maximize" || key == "maximise" || key == "maximum" || key == "max")
    throw InvalidInput("maximization models are not supported");
  if (key == "subjectto" || key == "suchthat" || key == "st" || key == "s.t.") return Section::constraints;
  if (key == "bounds" || key == "bound") return Section::bounds;
  if (key == "binaries" || key == "binary" || key == "bin") return Section::binaries;
  if (key == "generals" || key == "general" || key == "gen") return Section::generals;
  if (key == "end") return Section::end;
  return std::nullopt;
}

bool name_char(char ch) {
  return std::isalnum(static_cast<unsigned char>(ch)) || std::string_view("_.[]{}#$%&!\"'~^|@?").find(ch) != std::string_view::npos;
}

void tokenize(std::string_view line, std::size_t line_no, std::vector<Token>& out) {
  std::size_t i = 0;
  while (i < line.size()) {
    char ch = line[i];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
    } else if (ch == ':') {
      out.push_back({Token::colon, ":", 0.0, line_no});
      ++i;
    } else if (ch == '+' || ch == '-') {
      // Signed infinity is a single number token.
      std::string rest = lower(line.substr(i + 1, 3));
      if (rest == "inf") {
        std::size_t j = i + 4;
        while (j < line.size() && std::isalpha(static_cast<unsigned char>(line[j]))) ++j;
        out.push_back({Token::number, std::string(line.substr(i, j - i)), ch == '-' ? -kInfinity : kInfinity, line_no});
        i = j;
      } else {
        out.push_back({Token::sign, std::string(1, ch), 0.0, line_no});
        ++i;
      }
    } else if (ch == '<' || ch == '>' || ch == '=') {
      std::size_t j = i + 1;
      while (j < line.size() && (line[j] == '<' || line[j] == '>' || line[j] == '=')) ++j;
      std::string op(line.substr(i, j - i));
      std::string canonical;
      if (op == "<=" || op == "=<" || op == "<") canonical = "<=";
      else if (op == ">=" || op == "=>" || op == ">") canonical = ">=";
      else if (op == "=") canonical = "=";
      else throw LpParseError(line_no, "unknown operator '" + op + "'");
      out.push_back({Token::sense, canonical, 0.0, line_no});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
      std::size_t j = i;
      while (j < line.size() && (std::isdigit(static_cast<unsigned char>(line[j])) || line[j] == '.')) ++j;
      if (j < line.size() && (line[j] == 'e' || line[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < line.size() && (line[k] == '+' || line[k] == '-')) ++k;
        if (k < line.size() && std::isdigit(static_cast<unsigned char>(line[k]))) {
          j = k;
          while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
        }
      }
      std::string text(line.substr(i, j - i));
      char* end = nullptr;
      double value = std::strtod(text.c_str(), &end);
      if (end != text.c_str() + text.size()) throw LpParseError(line_no, "bad number '" + text + "'");
      out.push_back({Token::number, text, value, line_no});
      i = j;
    } else if (name_char(ch)) {
      std::size_t j = i;
      while (j < line.size() && name_char(line[j])) ++j;
      std::string text(line.substr(i, j - i));
      std::string key = lower(text);
      if (key == "inf" || key == "infinity") out.push_back({Token::number, text, kInfinity, line_no});
      else out.push_back({Token::name, text, 0.0, line_no});
      i = j;
    } else {
      throw LpParseError(line_no, std::string("unexpected character '") + ch + "'");
    }
  }
}

class Parser {
 public:
  explicit Parser(MilpModel& model) : model_(model) {}

  std::size_t variable(const std::string& name) {
    if (auto k = model_.find(name)) return *k;
    return model_.add_variable(name, VarKind::continuous, 0.0, kInfinity);
  }

  // Linear expression until a sense operator or the end of the tokens.
  std::vector<Term> expression(const std::vector<Token>& t, std::size_t& i) {
    std::vector<Term> terms;
    while (i < t.size() && t[i].kind != Token::sense) {
      double coef = 1.0;
      bool have_coef = false;
      while (i < t.size() && t[i].kind == Token::sign) {
        if (t[i].text == "-") coef = -coef;
        ++i;
      }
      if (i < t.size() && t[i].kind == Token::number) {
        coef *= t[i].value;
        have_coef = true;
        ++i;
      }
      if (i < t.size() && t[i].kind == Token::name) {
        terms.push_back({variable(t[i].text), coef});
        ++i;
      } else if (have_coef) {
        throw LpParseError(t[i - 1].line, "constant terms in expressions are not supported");
      } else {
        throw LpParseError(i < t.size() ? t[i].line : 0, "malformed expression");
      }
    }
    return terms;
  }

  void objective(const std::vector<Token>& t) {
    std::size_t i = 0;
    if (t.size() >= 2 && t[0].kind == Token::name && t[1].kind == Token::colon) i = 2;
    auto terms = expression(t, i);
    if (i != t.size()) throw LpParseError(t[i].line, "unexpected token in objective");
    model_.objective = combine_terms(terms);
  }

  void constraints(const std::vector<Token>& t) {
    std::size_t i = 0;
    std::size_t unnamed = 0;
    while (i < t.size()) {
      std::string name;
      if (i + 1 < t.size() && t[i].kind == Token::name && t[i + 1].kind == Token::colon) {
        name = t[i].text;
        i += 2;
      } else {
        name = "R" + std::to_string(++unnamed);
      }
      auto terms = expression(t, i);
      if (i >= t.size()) throw LpParseError(t.back().line, "constraint '" + name + "' has no sense");
      Sense sense = t[i].text == "<=" ? Sense::le : t[i].text == ">=" ? Sense::ge : Sense::eq;
      ++i;
      double sign = 1.0;
      while (i < t.size() && t[i].kind == Token::sign) {
        if (t[i].text == "-") sign = -sign;
        ++i;
      }
      if (i >= t.size() || t[i].kind != Token::number)
        throw LpParseError(t[i - 1].line, "constraint '" + name + "' has no right-hand side");
      model_.add_constraint(name, terms, sense, sign * t[i].value);
      ++i;
    }
  }

  void bound_line(const std::vector<Token>& t) {
    auto num = [&](std::size_t& i) {
      double sign = 1.0;
      while (i < t.size() && t[i].kind == Token::sign) {
        if (t[i].text == "-") sign = -sign;
        ++i;
      }
      if (i >= t.size() || t[i].kind != Token::number) throw LpParseError(t.front().line, "malformed bound");
      return sign * t[i++].value;
    };
    const std::size_t line = t.front().line;
    if (t.size() == 2 && t[0].kind == Token::name && t[1].kind == Token::name && lower(t[1].text) == "free") {
      auto& v = model_.variables[variable(t[0].text)];
      v.lower = -kInfinity;
      v.upper = kInfinity;
      return;
    }
    std::size_t i = 0;
    if (t[0].kind == Token::name) {
      // name op value
      auto& v = model_.variables[variable(t[0].text)];
      i = 1;
      if (i >= t.size() || t[i].kind != Token::sense) throw LpParseError(line, "malformed bound");
      std::string op = t[i++].text;
      double value = num(i);
      if (op == "<=") v.upper = value;
      else if (op == ">=") v.lower = value;
      else v.lower = v.upper = value;
    } else {
      // value op name [op value]
      double first = num(i);
      if (i + 1 >= t.size() || t[i].kind != Token::sense || t[i + 1].kind != Token::name)
        throw LpParseError(line, "malformed bound");
      std::string op = t[i].text;
      auto& v = model_.variables[variable(t[i + 1].text)];
      i += 2;
      if (op == "<=") v.lower = first;
      else if (op == ">=") v.upper = first;
      else v.lower = v.upper = first;
      if (i < t.size()) {
        if (t[i].kind != Token::sense) throw LpParseError(line, "malformed bound");
        std::string op2 = t[i++].text;
        double second = num(i);
        if (op2 == "<=") v.upper = second;
        else if (op2 == ">=") v.lower = second;
        else throw LpParseError(line, "malformed bound");
      }
    }
    if (i != t.size()) throw LpParseError(line, "trailing tokens in bound");
  }

  void binaries(const std::vector<Token>& t) {
    for (const auto& tok : t) {
      if (tok.kind != Token::name) throw LpParseError(tok.line, "expected a variable name in Binaries");
      auto& v = model_.variables[variable(tok.text)];
      v.kind = VarKind::binary;
      v.lower = 0.0;
      v.upper = 1.0;
    }
  }

 private:
  MilpModel& model_;
};

}  // namespace

MilpModel parse_lp(std::string_view text) {
  MilpModel model;
  Parser parser(model);
  Section section = Section::none;
  std::vector<Token> objective, rows, binaries;
  std::vector<std::vector<Token>> bounds;
  bool seen_objective = false, seen_end = false;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (auto cut = line.find('\\'); cut != std::string_view::npos) line = line.substr(0, cut);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    if (seen_end) throw LpParseError(line_no, "content after End");

    if (auto header = section_header(line)) {
      section = *header;
      if (section == Section::objective) seen_objective = true;
      if (section == Section::generals) throw LpParseError(line_no, "general integer variables are not supported");
      if (section == Section::end) seen_end = true;
      continue;
    }
    switch (section) {
      case Section::none: throw LpParseError(line_no, "content before the objective section");
      case Section::objective: tokenize(line, line_no, objective); break;
      case Section::constraints: tokenize(line, line_no, rows); break;
      case Section::bounds: {
        std::vector<Token> t;
        tokenize(line, line_no, t);
        bounds.push_back(std::move(t));
        break;
      }
      case Section::binaries: tokenize(line, line_no, binaries); break;
      default: break;
    }
  }
  if (!seen_objective) throw LpParseError(line_no, "missing objective section");
  if (!seen_end) throw LpParseError(line_no, "missing End");

  parser.objective(objective);
  parser.constraints(rows);
  for (const auto& t : bounds) parser.bound_line(t);
  parser.binaries(binaries);
  return model;
}

}  // namespace rmsn::milp
