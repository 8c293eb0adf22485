#pragma once

#include "signnet/activation.hpp"
#include "signnet/boundary.hpp"
#include "signnet/domain.hpp"
#include "signnet/error.hpp"
#include "signnet/fixtures.hpp"
#include "signnet/network.hpp"
#include "signnet/order.hpp"
#include "signnet/parallel.hpp"
#include "signnet/rewrite.hpp"
#include "signnet/rng.hpp"
#include "signnet/serialize.hpp"
#include "signnet/tasks.hpp"
#include "signnet/tensor.hpp"
#include "signnet/training.hpp"
#include "signnet/witness.hpp"
