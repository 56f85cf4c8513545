// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "testkit.hpp"

#include <doctest.h>


TEST_SUITE("oracle")
{
    TEST_CASE("tracer matches brute-force enumeration on a single building")
    {
        const auto scene = testkit::single_building();
        for (const auto &c : testkit::oracle_cases())
        {
            CAPTURE(c.name);
            std::size_t n = 0;
            const auto diff = testkit::compare_with_oracle(scene, c, &n);
            for (const auto &m : diff)
                MESSAGE(m.what);
            CHECK(diff.empty());
            CHECK(n > 0);
        }
    }

    TEST_CASE("tracer matches brute-force enumeration across a street")
    {
        const auto scene = testkit::two_buildings();
        for (const auto &c : testkit::street_cases())
        {
            CAPTURE(c.name);
            std::size_t n = 0;
            const auto diff = testkit::compare_with_oracle(scene, c, &n);
            for (const auto &m : diff)
                MESSAGE(m.what);
            CHECK(diff.empty());
            CHECK(n > 0);
        }
    }
}
