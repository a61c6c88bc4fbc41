// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mapio/error.hpp"
#include "mapio/geometry.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mapio::detail {

using nlohmann::json;

[[noreturn]] inline void schema_error(const std::string& path, const std::string& what)
{
    fail(ErrorKind::Validation, path + ": " + what);
}

inline std::string child(const std::string& path, std::string_view key)
{
    return path + "/" + std::string(key);
}

inline std::string child(const std::string& path, std::size_t index)
{
    return path + "/" + std::to_string(index);
}

inline const json& require(const json& obj, std::string_view key, const std::string& path)
{
    if (!obj.is_object())
        schema_error(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end())
        schema_error(child(path, key), "missing required field");
    return *it;
}

inline const json* optional_field(const json& obj, std::string_view key)
{
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null())
        return nullptr;
    return &*it;
}

inline std::string as_string(const json& v, const std::string& path)
{
    if (!v.is_string())
        schema_error(path, "expected a string");
    return v.get<std::string>();
}

inline double as_number(const json& v, const std::string& path)
{
    if (!v.is_number())
        schema_error(path, "expected a number");
    return v.get<double>();
}

inline bool as_bool(const json& v, const std::string& path)
{
    if (!v.is_boolean())
        schema_error(path, "expected a boolean");
    return v.get<bool>();
}

inline const json& as_array(const json& v, const std::string& path)
{
    if (!v.is_array())
        schema_error(path, "expected an array");
    return v;
}

inline Point2D as_point(const json& v, const std::string& path)
{
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        schema_error(path, "expected [x, y] numbers");
    Point2D p{v[0].get<double>(), v[1].get<double>()};
    if (!is_finite(p))
        schema_error(path, "coordinates must be finite");
    return p;
}

inline std::string string_or(const json& obj, std::string_view key, const std::string& path, std::string fallback = {})
{
    if (const json* v = optional_field(obj, key))
        return as_string(*v, child(path, key));
    return fallback;
}

inline bool bool_or(const json& obj, std::string_view key, const std::string& path, bool fallback)
{
    if (const json* v = optional_field(obj, key))
        return as_bool(*v, child(path, key));
    return fallback;
}

inline std::vector<std::string> string_list(const json& obj, std::string_view key, const std::string& path)
{
    std::vector<std::string> out;
    const json* v = optional_field(obj, key);
    if (!v)
        return out;
    const auto p = child(path, key);
    as_array(*v, p);
    for (std::size_t i = 0; i < v->size(); ++i)
        out.push_back(as_string((*v)[i], child(p, i)));
    return out;
}

inline json point_json(Point2D p)
{
    return json::array({p.x, p.y});
}

} // namespace mapio::detail
