// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string_view>

namespace mapio {

/// Answer-quality categories, in report column order.
enum class Label { DeceptivelyWrong, NotReplying, BlatantlyWrong, PartialIncomplete, CorrectNotOptimal, Correct };

inline constexpr std::array<Label, 6> kAllLabels = {Label::DeceptivelyWrong,  Label::NotReplying,
                                                    Label::BlatantlyWrong,    Label::PartialIncomplete,
                                                    Label::CorrectNotOptimal, Label::Correct};

std::string_view to_string(Label l);   // "Correct"
std::string_view short_code(Label l);  // "C"
/// Accepts full names (any case, spaces/underscores/hyphens ignored) and short codes.
Label parse_label(std::string_view text);

} // namespace mapio
