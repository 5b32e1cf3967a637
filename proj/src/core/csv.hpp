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

#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace scgpr::csv
{

// RFC 4180: fields containing a comma, quote, CR or LF are wrapped in quotes
// with embedded quotes doubled.
std::string quote(std::string_view field);

// %.10g with "inf", "-inf" and "nan" spelled out; locale independent.
std::string format_number(double value);

std::string join_row(const std::vector<std::string> &fields);

class Writer
{
  public:
    explicit Writer(std::ostream &out) : out_(out) {}

    // Writes one record terminated by CRLF.
    void row(const std::vector<std::string> &fields);

  private:
    std::ostream &out_;
};

} // namespace scgpr::csv
