#pragma once

// Cross-lingual semantic textual similarity over a linearly mapped bilingual
// embedding space: word-vector storage, translation-matrix training, three
// unsupervised sentence similarity scores, evaluation metrics, and the
// parallel-sentence-mining and plagiarism-retrieval pipelines.

#include "assignment.hpp"
#include "embedding_space.hpp"
#include "errors.hpp"
#include "evalkit.hpp"
#include "mining.hpp"
#include "plagiarism.hpp"
#include "scoring.hpp"
#include "tokenizer.hpp"
#include "translation.hpp"
