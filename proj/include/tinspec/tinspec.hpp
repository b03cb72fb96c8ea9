#pragma once

#include "tinspec/ar_model.hpp"
#include "tinspec/completion.hpp"
#include "tinspec/covariance.hpp"
#include "tinspec/errors.hpp"
#include "tinspec/io.hpp"
#include "tinspec/lmmse.hpp"
#include "tinspec/nonstationary.hpp"
#include "tinspec/rar_fit.hpp"
#include "tinspec/rar_spectrum.hpp"
#include "tinspec/spectrum.hpp"
