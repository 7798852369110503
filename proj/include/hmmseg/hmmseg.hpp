// Copyright 2026 The hmmseg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "hmmseg/corpus.hpp"
#include "hmmseg/error.hpp"
#include "hmmseg/eval.hpp"
#include "hmmseg/gaussian.hpp"
#include "hmmseg/grammar.hpp"
#include "hmmseg/hmm.hpp"
#include "hmmseg/io.hpp"
#include "hmmseg/numeric.hpp"
#include "hmmseg/parallel.hpp"
#include "hmmseg/synth.hpp"
#include "hmmseg/training.hpp"
