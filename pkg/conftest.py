# make the repo-root ``plots`` package importable when pytest is run directly
