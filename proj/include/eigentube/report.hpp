#ifndef EIGENTUBE_REPORT_HPP
#define EIGENTUBE_REPORT_HPP

#include <string>
#include <utility>
#include <vector>

#include "eigentube/common.hpp"

namespace eigentube {

// Small JSON value tree with deterministic serialization: object keys keep
// insertion order and every float is written with 17 significant digits, so
// identical runs produce identical bytes.
class Json {
 public:
  static Json object() { return Json(Kind::object); }
  static Json array() { return Json(Kind::array); }
  Json() : kind_(Kind::null) {}
  Json(bool b) : kind_(Kind::boolean), bool_(b) {}
  Json(double v) : kind_(Kind::number), num_(v) {}
  Json(int v) : kind_(Kind::integer), int_(v) {}
  Json(long long v) : kind_(Kind::integer), int_(v) {}
  Json(std::uint64_t v) : kind_(Kind::integer), int_(static_cast<long long>(v)) {}
  Json(const char* s) : kind_(Kind::string), str_(s) {}
  Json(std::string s) : kind_(Kind::string), str_(std::move(s)) {}

  Json& set(const std::string& key, Json value);
  Json& push(Json value);
  std::string dump() const;

 private:
  enum class Kind { null, boolean, number, integer, string, array, object };
  explicit Json(Kind k) : kind_(k) {}
  void dump_to(std::string& out) const;

  Kind kind_;
  bool bool_ = false;
  double num_ = 0.0;
  long long int_ = 0;
  std::string str_;
  std::vector<Json> items_;
  std::vector<std::pair<std::string, Json>> fields_;
};

std::string format_float(double v);  // %.17g
std::string csv_line(const std::vector<std::string>& cells);

}  // namespace eigentube

#endif
