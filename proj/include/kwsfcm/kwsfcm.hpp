#ifndef KWSFCM_KWSFCM_HPP
#define KWSFCM_KWSFCM_HPP

#include "kwsfcm/clustering.hpp"
#include "kwsfcm/image.hpp"
#include "kwsfcm/kernel.hpp"
#include "kwsfcm/metrics.hpp"
#include "kwsfcm/noise.hpp"
#include "kwsfcm/parallel.hpp"
#include "kwsfcm/pipeline.hpp"
#include "kwsfcm/rng.hpp"
#include "kwsfcm/susan.hpp"

#endif
