"""Rate regions for cooperative relay broadcast channels with feedback."""
