#pragma once

#include "entanglecone/classify.hpp"
#include "entanglecone/choi_duality.hpp"
#include "entanglecone/definite_set.hpp"
#include "entanglecone/eigen.hpp"
#include "entanglecone/errors.hpp"
#include "entanglecone/matrix.hpp"
#include "entanglecone/positivity.hpp"
#include "entanglecone/random.hpp"
#include "entanglecone/separability.hpp"
