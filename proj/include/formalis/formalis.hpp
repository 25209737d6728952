#pragma once

#include "formalis/error.hpp"
#include "formalis/number_theory.hpp"
#include "formalis/linalg.hpp"
#include "formalis/bigraded.hpp"
#include "formalis/dgg_algebra.hpp"
#include "formalis/derived.hpp"
#include "formalis/tower.hpp"
#include "formalis/polynomial.hpp"
#include "formalis/coxeter.hpp"
#include "formalis/kl.hpp"
#include "formalis/weights.hpp"
#include "formalis/parity_data.hpp"
#include "formalis/approx.hpp"
#include "formalis/table.hpp"
#include "formalis/json_io.hpp"
