// SPDX-License-Identifier: Apache-2.0
#include "mapio/label.hpp"

#include "mapio/error.hpp"

#include <cctype>
#include <string>

namespace mapio {

namespace {

constexpr std::array<std::string_view, 6> kNames = {"Deceptively wrong",       "Not replying to question",
                                                    "Blatantly wrong",         "Partial or incomplete",
                                                    "Correct but not optimal", "Correct"};
constexpr std::array<std::string_view, 6> kCodes = {"DW", "NRW", "BW", "PI", "CNO", "C"};
constexpr std::array<std::string_view, 6> kIdents = {"deceptivelywrong",  "notreplying",       "blatantlywrong",
                                                     "partialincomplete", "correctnotoptimal", "correct"};

std::string squash(std::string_view s)
{
    std::string out;
    for (char c : s)
    {
        if (c == ' ' || c == '_' || c == '-')
            continue;
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

} // namespace

std::string_view to_string(Label l)
{
    return kNames[static_cast<std::size_t>(l)];
}

std::string_view short_code(Label l)
{
    return kCodes[static_cast<std::size_t>(l)];
}

Label parse_label(std::string_view text)
{
    const auto key = squash(text);
    for (std::size_t i = 0; i < kAllLabels.size(); ++i)
    {
        if (key == squash(kCodes[i]) || key == squash(kNames[i]) || key == kIdents[i])
            return kAllLabels[i];
    }
    fail(ErrorKind::Validation, "unknown label '" + std::string(text) + "'");
}

} // namespace mapio
