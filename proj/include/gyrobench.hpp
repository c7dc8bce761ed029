#ifndef GYROBENCH_HPP
#define GYROBENCH_HPP

#include "gyrobench/common.hpp"
#include "gyrobench/fftplan.hpp"
#include "gyrobench/harness.hpp"
#include "gyrobench/inputs.hpp"
#include "gyrobench/kernels.hpp"
#include "gyrobench/report.hpp"

#endif  // GYROBENCH_HPP
