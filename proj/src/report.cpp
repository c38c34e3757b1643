#include "phicurv/report.hpp"

#include <algorithm>
#include <cstdio>

namespace phicurv {

bool ResidualReport::all_passed(bool selected_must_run) const {
  for (const auto& c : checks) {
    if (c.status == CheckResult::Status::Fail) return false;
    if (selected_must_run && c.status == CheckResult::Status::Skipped) return false;
  }
  return true;
}

const CheckResult* ResidualReport::find(const std::string& id) const {
  for (const auto& c : checks)
    if (c.id == id) return &c;
  return nullptr;
}

namespace {

void append_escaped(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

void append_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

const char* status_name(CheckResult::Status s) {
  switch (s) {
    case CheckResult::Status::Pass: return "pass";
    case CheckResult::Status::Fail: return "fail";
    case CheckResult::Status::Skipped: return "skipped";
  }
  return "?";
}

}  // namespace

std::string to_json(const ResidualReport& report) {
  std::vector<const CheckResult*> ordered;
  ordered.reserve(report.checks.size());
  for (const auto& c : report.checks) ordered.push_back(&c);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const CheckResult* a, const CheckResult* b) { return a->id < b->id; });

  std::string out;
  out += "{\n";
  out += "  \"schema\": 1,\n";
  out += "  \"source\": ";
  append_escaped(out, report.source);
  out += ",\n  \"file_hash\": ";
  append_escaped(out, report.file_hash);
  out += ",\n  \"jet_order\": " + std::to_string(report.jet_order);
  out += ",\n  \"seed\": " + std::to_string(report.seed);
  out += ",\n  \"tol_scale\": ";
  append_double(out, report.tol_scale);
  out += ",\n  \"checks\": [";
  bool first = true;
  for (const CheckResult* c : ordered) {
    out += first ? "\n" : ",\n";
    first = false;
    out += "    {\"id\": ";
    append_escaped(out, c->id);
    out += ", \"name\": ";
    append_escaped(out, c->name);
    out += ", \"anchor\": ";
    append_escaped(out, c->anchor);
    out += ", \"status\": ";
    append_escaped(out, status_name(c->status));
    if (c->status == CheckResult::Status::Skipped) {
      out += ", \"reason\": ";
      append_escaped(out, c->skip_reason);
    } else {
      out += ", \"tolerance\": ";
      append_double(out, c->tolerance);
      out += ", \"max_residual\": ";
      append_double(out, c->max_residual);
      out += ", \"residuals\": [";
      for (std::size_t i = 0; i < c->residuals.size(); ++i) {
        if (i) out += ", ";
        append_double(out, c->residuals[i]);
      }
      out += "]";
    }
    out += "}";
  }
  out += "\n  ],\n";
  out += std::string("  \"all_passed\": ") +
         (report.all_passed() ? "true" : "false") + "\n";
  out += "}\n";
  return out;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace phicurv
