#include <cstdio>
#include <string>

#include "eroscan/eval.hpp"

namespace eroscan {

namespace {

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

void append_row(std::string& out, const ClassMetrics& m) {
  out += m.name + ',' + std::to_string(m.images) + ',' +
         std::to_string(m.instances) + ',' + fixed(m.precision) + ',' +
         fixed(m.recall) + ',' + fixed(m.ap50) + ',' + fixed(m.ap50_95) + '\n';
}

}  // namespace

std::string write_report_table(const EvalReport& report) {
  std::string out = "Clase,Imágenes,Instancias,";
  out += report.geometry == Geometry::kBox ? "Box(P)" : "Mask(P)";
  out += ",R,mAP50,mAP50-95\n";
  append_row(out, report.all);
  for (const auto& m : report.classes) append_row(out, m);
  return out;
}

std::string write_confusion_table(const EvalReport& report,
                                  const ClassMap& classes) {
  const auto& cm = report.confusion;
  auto label = [&](int i) {
    return i == cm.background() ? std::string("background") : classes.name(i);
  };
  std::string out = "predicted\\true";
  for (int c = 0; c <= cm.num_classes; ++c) out += ',' + label(c);
  out += '\n';
  for (int r = 0; r <= cm.num_classes; ++r) {
    out += label(r);
    for (int c = 0; c <= cm.num_classes; ++c) {
      out += ',' + fixed(cm.normalized[static_cast<std::size_t>(r)]
                                      [static_cast<std::size_t>(c)]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace eroscan
