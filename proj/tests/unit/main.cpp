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

#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>

#include <spdlog/spdlog.h>

// Engine warnings are expected in failure-path tests; set RAGFORGE_TEST_LOG to see them.
int main(int argc, char** argv) {
    if (std::getenv("RAGFORGE_TEST_LOG") == nullptr) {
        spdlog::set_level(spdlog::level::off);
    }
    doctest::Context context(argc, argv);
    return context.run();
}
