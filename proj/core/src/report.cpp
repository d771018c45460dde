namespace hjmcal {}
