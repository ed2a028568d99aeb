/* SPDX-License-Identifier: Apache-2.0 */

#include "iml/sexpr.hpp"

#include <cctype>

namespace iml {

SExpr SExpr::make_atom(std::string a) {
  SExpr e;
  e.atom = std::move(a);
  return e;
}

SExpr SExpr::make_list(std::vector<SExpr> xs) {
  SExpr e;
  e.is_list = true;
  e.list = std::move(xs);
  return e;
}

const std::string& SExpr::head() const {
  static const std::string empty;
  if (!is_list || list.empty() || list[0].is_list) return empty;
  return list[0].atom;
}

namespace {

bool is_blank(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

class Reader {
 public:
  explicit Reader(std::string_view s) : s_(s) {}

  void skip() {
    while (pos_ < s_.size()) {
      if (is_blank(s_[pos_])) {
        ++pos_;
      } else if (s_[pos_] == ';') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  bool done() {
    skip();
    return pos_ >= s_.size();
  }

  SExpr read() {
    skip();
    if (pos_ >= s_.size()) throw SExprError("unexpected end of S-expression input");
    char c = s_[pos_];
    if (c == ')') throw SExprError("unbalanced ')' at offset " + std::to_string(pos_));
    if (c == '(') {
      ++pos_;
      std::vector<SExpr> xs;
      for (;;) {
        skip();
        if (pos_ >= s_.size()) throw SExprError("unterminated list");
        if (s_[pos_] == ')') {
          ++pos_;
          return SExpr::make_list(std::move(xs));
        }
        xs.push_back(read());
      }
    }
    std::size_t start = pos_;
    if (c == '"') {
      ++pos_;
      for (;;) {
        if (pos_ >= s_.size()) throw SExprError("unterminated string literal");
        if (s_[pos_] == '"') {
          if (pos_ + 1 < s_.size() && s_[pos_ + 1] == '"') {
            pos_ += 2;
            continue;
          }
          ++pos_;
          break;
        }
        ++pos_;
      }
    } else if (c == '|') {
      auto close = s_.find('|', pos_ + 1);
      if (close == std::string_view::npos) throw SExprError("unterminated quoted symbol");
      pos_ = close + 1;
    } else {
      while (pos_ < s_.size() && !is_blank(s_[pos_]) && s_[pos_] != '(' && s_[pos_] != ')' && s_[pos_] != ';' &&
             s_[pos_] != '"')
        ++pos_;
    }
    return SExpr::make_atom(std::string(s_.substr(start, pos_ - start)));
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

void print(const SExpr& e, std::string& out) {
  if (e.is_atom()) {
    out += e.atom;
    return;
  }
  out += '(';
  for (std::size_t i = 0; i < e.list.size(); ++i) {
    if (i) out += ' ';
    print(e.list[i], out);
  }
  out += ')';
}

}  // namespace

std::vector<SExpr> parse_sexprs(std::string_view text) {
  Reader r(text);
  std::vector<SExpr> out;
  while (!r.done()) out.push_back(r.read());
  return out;
}

SExpr parse_sexpr(std::string_view text) {
  Reader r(text);
  SExpr e = r.read();
  if (!r.done()) throw SExprError("trailing input after S-expression");
  return e;
}

std::string to_string(const SExpr& e) {
  std::string out;
  print(e, out);
  return out;
}

std::size_t complete_sexpr_length(std::string_view s) {
  std::size_t i = 0;
  int depth = 0;
  bool started = false;
  while (i < s.size()) {
    char c = s[i];
    if (!started) {
      if (is_blank(c)) {
        ++i;
        continue;
      }
      if (c == ';') {
        while (i < s.size() && s[i] != '\n') ++i;
        continue;
      }
      started = true;
    }
    if (c == '(') {
      ++depth;
      ++i;
    } else if (c == ')') {
      --depth;
      ++i;
      if (depth <= 0) return i;
    } else if (c == '"') {
      ++i;
      for (;;) {
        if (i >= s.size()) return 0;
        if (s[i] == '"') {
          if (i + 1 < s.size() && s[i + 1] == '"') {
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        ++i;
      }
      if (depth == 0) return i;
    } else if (c == '|') {
      auto close = s.find('|', i + 1);
      if (close == std::string_view::npos) return 0;
      i = close + 1;
      if (depth == 0) return i;
    } else if (c == ';' && depth > 0) {
      while (i < s.size() && s[i] != '\n') ++i;
      if (i >= s.size()) return 0;
    } else if (is_blank(c)) {
      ++i;
    } else {
      // bare atom
      while (i < s.size() && !is_blank(s[i]) && s[i] != '(' && s[i] != ')' && s[i] != '"' && s[i] != ';') ++i;
      if (depth == 0) return i < s.size() ? i : 0;
    }
  }
  return 0;
}

std::string smt_quote(const std::string& name) {
  static const std::string extra = "~!@$%^&*_-+=<>.?/";
  bool simple = !name.empty() && !std::isdigit(static_cast<unsigned char>(name[0]));
  for (char c : name)
    if (!std::isalnum(static_cast<unsigned char>(c)) && extra.find(c) == std::string::npos) simple = false;
  if (simple) return name;
  std::string q;
  for (char c : name) q += (c == '|' || c == '\\') ? '_' : c;
  return "|" + q + "|";
}

}  // namespace iml
