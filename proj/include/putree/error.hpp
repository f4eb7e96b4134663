/*
 * Copyright 2026 putree contributors
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace putree {

/// Error taxonomy shared by all modules. The CLI maps ConfigError to exit
/// code 1 and everything else to exit code 2.
class Error : public std::runtime_error {
public:
    enum class Kind {
        Parse,      // malformed input file
        Schema,     // input does not match the declared schema
        Capacity,   // requested sample sizes exceed available data
        Dimension,  // shape mismatch between operands
        Routing,    // routing through a leaf or missing split
        Config,     // invalid configuration value
        Io,         // filesystem failure
    };

    Error(Kind kind, std::string msg) : std::runtime_error(std::move(msg)), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

inline Error parse_error(std::string msg) { return {Error::Kind::Parse, std::move(msg)}; }
inline Error schema_error(std::string msg) { return {Error::Kind::Schema, std::move(msg)}; }
inline Error capacity_error(std::string msg) { return {Error::Kind::Capacity, std::move(msg)}; }
inline Error dim_error(std::string msg) { return {Error::Kind::Dimension, std::move(msg)}; }
inline Error routing_error(std::string msg) { return {Error::Kind::Routing, std::move(msg)}; }
inline Error config_error(std::string msg) { return {Error::Kind::Config, std::move(msg)}; }
inline Error io_error(std::string msg) { return {Error::Kind::Io, std::move(msg)}; }

}  // namespace putree
