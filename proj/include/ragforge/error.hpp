/*
 * Copyright 2026 The ragforge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
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

namespace ragforge {

/// Base class of every error raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input document does not match the expected JSON shape.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Input parsed but violates a domain invariant (duplicate keys, dangling labels).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Caller passed an argument outside an operation's precondition.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Remote endpoint could not be reached or returned a transient failure.
class TransportError : public Error {
public:
    using Error::Error;
};

/// Remote endpoint answered with a malformed or inconsistent payload.
class ProtocolError : public Error {
public:
    using Error::Error;
};

/// Persisted file has the wrong magic, version or layout.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Configuration is invalid or inconsistent with the loaded artifacts.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Internal linkage broken (child points at a missing parent and similar).
class IntegrityError : public Error {
public:
    using Error::Error;
};

/// Answer generation failed after all retries.
class GenerationError : public Error {
public:
    using Error::Error;
};

/// Judge completion could not be parsed into a 1-5 score.
class ScoreParseError : public Error {
public:
    using Error::Error;
};

}  // namespace ragforge
