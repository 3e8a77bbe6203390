"""Hidden friend list recovery strategies against a simulated social network."""
