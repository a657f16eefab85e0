#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eroscan/labelset.hpp"

namespace eroscan::detail {

std::vector<std::string_view> split_tokens(std::string_view line);

/// Shared label/prediction parser. When `with_confidence` is set the last
/// token is the confidence.
Annotation parse_tokens(std::span<const std::string_view> tokens,
                        LabelMode mode, const ClassMap& classes,
                        bool with_confidence, std::string_view line);

std::string format_fixed(double v);

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    fn(line, line_no);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

bool is_blank(std::string_view line);

}  // namespace eroscan::detail
