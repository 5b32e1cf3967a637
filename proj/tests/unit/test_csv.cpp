// SPDX-License-Identifier: Apache-2.0
//
// scgpr: correlated-MIMO channel estimation with spatial-correlation kernels
// Copyright (C) 2026 The scgpr Authors
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

#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "core/csv.hpp"

using namespace scgpr;

TEST(Csv, QuotesOnlyWhenNeeded)
{
    EXPECT_EQ(csv::quote("plain"), "plain");
    EXPECT_EQ(csv::quote("a,b"), "\"a,b\"");
    EXPECT_EQ(csv::quote("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(csv::quote("line\nbreak"), "\"line\nbreak\"");
    EXPECT_EQ(csv::quote(""), "");
}

TEST(Csv, NumberFormat)
{
    EXPECT_EQ(csv::format_number(0.0), "0");
    EXPECT_EQ(csv::format_number(-12.5), "-12.5");
    EXPECT_EQ(csv::format_number(1.0 / 3.0), "0.3333333333");
    EXPECT_EQ(csv::format_number(1.5e-7), "1.5e-07");
    EXPECT_EQ(csv::format_number(-std::numeric_limits<double>::infinity()), "-inf");
    EXPECT_EQ(csv::format_number(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(csv::format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
}

TEST(Csv, WriterUsesCrLf)
{
    std::ostringstream s;
    csv::Writer w(s);
    w.row({"a", "b,c"});
    w.row({"1", ""});
    EXPECT_EQ(s.str(), "a,\"b,c\"\r\n1,\r\n");
}
