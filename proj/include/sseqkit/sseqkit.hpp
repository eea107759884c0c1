#pragma once

#include "sseqkit/arith.hpp"
#include "sseqkit/bigraded.hpp"
#include "sseqkit/chart.hpp"
#include "sseqkit/cohomology.hpp"
#include "sseqkit/eon.hpp"
#include "sseqkit/fin_ab_group.hpp"
#include "sseqkit/galois_field.hpp"
#include "sseqkit/matrix.hpp"
#include "sseqkit/padic.hpp"
#include "sseqkit/picard.hpp"
#include "sseqkit/smith.hpp"
#include "sseqkit/sseq.hpp"
