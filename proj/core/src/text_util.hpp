// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace mapio::detail {

inline std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

inline std::string trim(std::string_view s)
{
    const auto* b = s.begin();
    const auto* e = s.end();
    while (b != e && std::isspace(static_cast<unsigned char>(*b)))
        ++b;
    while (e != b && std::isspace(static_cast<unsigned char>(*(e - 1))))
        --e;
    return std::string(b, e);
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i)
    {
        if (i)
            out += sep;
        out += parts[i];
    }
    return out;
}

/// "a", "a and b", "a, b and c"
inline std::string join_and(const std::vector<std::string>& parts)
{
    if (parts.size() <= 1)
        return parts.empty() ? std::string() : parts.front();
    std::string out;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i)
    {
        if (i)
            out += ", ";
        out += parts[i];
    }
    return out + " and " + parts.back();
}

inline std::vector<std::string> split_ws(std::string_view s)
{
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size())
    {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i])))
            ++i;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])))
            ++j;
        if (j > i)
            out.emplace_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

} // namespace mapio::detail
