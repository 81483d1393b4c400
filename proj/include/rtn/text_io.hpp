#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rtn {

// All numeric files use %.17g so that doubles round-trip bit-exactly and
// identical runs produce byte-identical artifacts.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_row(std::ostream& os, const double* v, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    if (i) os << ' ';
    os << fmt17(v[i]);
  }
  os << '\n';
}

inline void write_row(std::ostream& os, const std::vector<double>& v) {
  write_row(os, v.data(), v.size());
}

// Line/token reader with positional error messages.
class TextReader {
 public:
  TextReader(std::istream& is, std::string origin) : is_(is), origin_(std::move(origin)) {}

  std::string line() {
    std::string l;
    if (!std::getline(is_, l)) fail("unexpected end of file");
    ++lineno_;
    return l;
  }

  bool try_line(std::string& out) {
    if (!std::getline(is_, out)) return false;
    ++lineno_;
    return true;
  }

  std::vector<std::string> tokens() {
    std::istringstream ss(line());
    std::vector<std::string> out;
    std::string t;
    while (ss >> t) out.push_back(t);
    return out;
  }

  std::vector<double> reals(size_t expect) {
    std::istringstream ss(line());
    std::vector<double> out;
    out.reserve(expect);
    double v;
    while (ss >> v) out.push_back(v);
    if (out.size() != expect)
      fail("expected " + std::to_string(expect) + " reals, got " + std::to_string(out.size()));
    return out;
  }

  void expect(const std::string& literal) {
    std::string l = line();
    if (l != literal) fail("expected '" + literal + "', got '" + l + "'");
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error(origin_ + ":" + std::to_string(lineno_) + ": " + what);
  }

  int lineno() const { return lineno_; }

 private:
  std::istream& is_;
  std::string origin_;
  int lineno_ = 0;
};

inline std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  return os;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  return is;
}

}  // namespace rtn
