#pragma once

// Umbrella header for the segconv library: 2x-upsampling transpose
// convolution computed directly on the un-upsampled input through four
// parity sub-kernels, plus the reference pipeline it is verified against,
// op/memory accounting, benchmarking, and the small training demo.

#include "segconv/analysis.hpp"
#include "segconv/bench.hpp"
#include "segconv/errors.hpp"
#include "segconv/fused_tconv.hpp"
#include "segconv/geometry.hpp"
#include "segconv/image/pnm.hpp"
#include "segconv/netdemo/dataset.hpp"
#include "segconv/netdemo/layers.hpp"
#include "segconv/netdemo/model.hpp"
#include "segconv/op_counts.hpp"
#include "segconv/reference_ops.hpp"
#include "segconv/segregation.hpp"
#include "segconv/tensor.hpp"
#include "segconv/tensor_io.hpp"
#include "segconv/verify.hpp"
