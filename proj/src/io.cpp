// implementation arrives with its module
