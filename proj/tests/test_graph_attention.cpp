// overwrite-me
