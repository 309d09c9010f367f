# Services: error signal, training data, forest, segmenter, baselines, evaluation
