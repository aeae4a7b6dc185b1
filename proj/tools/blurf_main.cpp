// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#include "blurf/cli.hpp"

int main(int argc, char** argv) { return blurf::cli_main(argc, argv); }
